#include "temo/embed/file_provider.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "temo/parse/chunker.hpp"
#include "temo/util/error.hpp"

namespace temo::embed {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<float> read_f32_blob(const fs::path& path, std::size_t count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::Io, "cannot open embedding blob: " + path.string());
    in.seekg(0, std::ios::end);
    auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes != count * sizeof(float))
        raise(ErrorKind::Parse, "embedding blob " + path.string() +
                                    " holds " + std::to_string(bytes) +
                                    " bytes, expected " +
                                    std::to_string(count * sizeof(float)));
    in.seekg(0);
    std::vector<float> vals(count);
    in.read(reinterpret_cast<char*>(vals.data()),
            static_cast<std::streamsize>(bytes));
    if (!in) raise(ErrorKind::Io, "short read on " + path.string());
    return vals;
}

void write_f32_blob(const fs::path& path, const double* vals, std::size_t count) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::Io, "cannot write embedding blob: " + path.string());
    std::vector<float> f(count);
    for (std::size_t i = 0; i < count; ++i) f[i] = static_cast<float>(vals[i]);
    out.write(reinterpret_cast<const char*>(f.data()),
              static_cast<std::streamsize>(count * sizeof(float)));
    if (!out) raise(ErrorKind::Io, "short write on " + path.string());
}

const json& require_key(const json& j, const std::string& key) {
    auto it = j.find(key);
    if (it == j.end())
        raise(ErrorKind::Parse, "embedding manifest is missing key: " + key);
    return *it;
}

std::vector<std::size_t> read_shape(const json& entry, const std::string& key) {
    const json& shape = require_key(entry, "shape");
    if (!shape.is_array() || shape.empty())
        raise(ErrorKind::Parse, key + ": shape must be a nonempty array");
    std::vector<std::size_t> dims;
    for (const json& d : shape) {
        if (!d.is_number_unsigned() || d.get<std::uint64_t>() == 0)
            raise(ErrorKind::Parse, key + ": shape entries must be positive integers");
        dims.push_back(d.get<std::size_t>());
    }
    return dims;
}

}  // namespace

FileProvider::FileProvider(std::vector<double> global_text,
                           ad::Mat word_features, std::uint64_t image_seed)
    : global_text_(std::move(global_text)),
      word_features_(std::move(word_features)),
      image_encoder_(image_seed) {
    if (global_text_.size() != kDim)
        raise(ErrorKind::Parse, "global_text must have 512 entries");
    if (word_features_.cols != kDim || word_features_.rows == 0)
        raise(ErrorKind::Parse, "word_features must be [m x 512] with m >= 1");
}

std::vector<double> FileProvider::global_text(const std::string&) const {
    return global_text_;
}

ad::Mat FileProvider::word_features(const std::string& prompt) const {
    std::size_t m = parse::words(prompt).size();
    if (m != word_features_.rows)
        raise(ErrorKind::Config,
              "stored word features cover " +
                  std::to_string(word_features_.rows) +
                  " words but the prompt has " + std::to_string(m));
    return word_features_;
}

ad::Tensor FileProvider::image_features(ad::Tape& tape,
                                        const std::vector<ad::Tensor>& images,
                                        std::size_t h, std::size_t w) const {
    return image_encoder_.image_features(tape, images, h, w);
}

std::unique_ptr<FileProvider> file_provider_load(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) raise(ErrorKind::Io, "cannot open embedding manifest: " + manifest_path);
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        raise(ErrorKind::Parse,
              "bad JSON in " + manifest_path + ": " + e.what());
    }
    fs::path dir = fs::path(manifest_path).parent_path();

    const json& gt = require_key(manifest, "global_text");
    std::vector<std::size_t> gt_shape = read_shape(gt, "global_text");
    if (gt_shape != std::vector<std::size_t>{EmbeddingProvider::kDim})
        raise(ErrorKind::Parse, "global_text shape must be [512]");
    std::vector<float> gt_vals = read_f32_blob(
        dir / require_key(gt, "path").get<std::string>(), EmbeddingProvider::kDim);

    const json& wf = require_key(manifest, "word_features");
    std::vector<std::size_t> wf_shape = read_shape(wf, "word_features");
    if (wf_shape.size() != 2 || wf_shape[1] != EmbeddingProvider::kDim)
        raise(ErrorKind::Parse, "word_features shape must be [m, 512]");
    std::vector<float> wf_vals = read_f32_blob(
        dir / require_key(wf, "path").get<std::string>(),
        wf_shape[0] * wf_shape[1]);

    std::vector<double> global_text(gt_vals.begin(), gt_vals.end());
    ad::Mat word_features(wf_shape[0], wf_shape[1]);
    for (std::size_t i = 0; i < wf_vals.size(); ++i)
        word_features.data[i] = static_cast<double>(wf_vals[i]);
    return std::make_unique<FileProvider>(std::move(global_text),
                                          std::move(word_features));
}

std::string write_embedding_file(const std::string& dir,
                                 const std::vector<double>& global_text,
                                 const ad::Mat& word_features) {
    if (global_text.size() != EmbeddingProvider::kDim)
        raise(ErrorKind::Config, "global_text must have 512 entries");
    if (word_features.cols != EmbeddingProvider::kDim)
        raise(ErrorKind::Config, "word_features must be [m x 512]");
    fs::path root(dir);
    fs::create_directories(root);
    write_f32_blob(root / "global_text.f32", global_text.data(),
                   global_text.size());
    write_f32_blob(root / "word_features.f32", word_features.data.data(),
                   word_features.size());
    json manifest = {
        {"global_text",
         {{"path", "global_text.f32"}, {"shape", {EmbeddingProvider::kDim}}}},
        {"word_features",
         {{"path", "word_features.f32"},
          {"shape", {word_features.rows, word_features.cols}}}}};
    fs::path mpath = root / "embeddings.json";
    std::ofstream out(mpath);
    if (!out) raise(ErrorKind::Io, "cannot write manifest: " + mpath.string());
    out << manifest.dump(2) << "\n";
    return mpath.string();
}

}  // namespace temo::embed
