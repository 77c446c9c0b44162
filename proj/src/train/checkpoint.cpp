#include "temo/train/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "temo/util/error.hpp"

namespace temo::train {
namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'T', 'E', 'M', 'O', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_mat(std::ofstream& out, const ad::Mat& m) {
    out.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.data.size() * sizeof(double)));
}

ad::Mat read_mat(std::ifstream& in, std::size_t rows, std::size_t cols) {
    ad::Mat m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data.data()),
            static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const field::ParamSet& params,
                     const AdamW& optimizer) {
    if (optimizer.first_moments().size() != params.count())
        raise(ErrorKind::Config, "checkpoint: optimizer does not match parameters");
    json manifest;
    manifest["step"] = optimizer.step_count();
    manifest["params"] = json::array();
    for (int i = 0; i < static_cast<int>(params.count()); ++i) {
        const field::ParamSet::Entry& e = params.entry(i);
        manifest["params"].push_back(
            {{"name", e.name}, {"rows", e.value.rows}, {"cols", e.value.cols}});
    }
    std::string text = manifest.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::Io, "cannot write checkpoint: " + path);
    out.write(kMagic, sizeof(kMagic));
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (int i = 0; i < static_cast<int>(params.count()); ++i) {
        write_mat(out, params.entry(i).value);
        write_mat(out, optimizer.first_moments()[static_cast<std::size_t>(i)]);
        write_mat(out, optimizer.second_moments()[static_cast<std::size_t>(i)]);
    }
    if (!out) raise(ErrorKind::Io, "short write on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::Io, "cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        raise(ErrorKind::Parse, "not a checkpoint file: " + path);
    if (get_u32(in) != kVersion)
        raise(ErrorKind::Parse, "unsupported checkpoint version in " + path);
    std::uint32_t len = get_u32(in);
    std::string text(len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(len));
    if (!in) raise(ErrorKind::Parse, "truncated checkpoint manifest in " + path);

    json manifest = json::parse(text, nullptr, false);
    if (manifest.is_discarded() || !manifest.contains("step") ||
        !manifest.contains("params") || !manifest["params"].is_array())
        raise(ErrorKind::Parse, "malformed checkpoint manifest in " + path);

    Checkpoint ckpt;
    ckpt.step = manifest["step"].get<std::int64_t>();
    if (ckpt.step < 0)
        raise(ErrorKind::Parse, "checkpoint step is negative in " + path);
    for (const json& entry : manifest["params"]) {
        if (!entry.contains("name") || !entry.contains("rows") ||
            !entry.contains("cols"))
            raise(ErrorKind::Parse, "malformed parameter entry in " + path);
        std::string name = entry["name"].get<std::string>();
        auto rows = entry["rows"].get<std::size_t>();
        auto cols = entry["cols"].get<std::size_t>();
        if (rows == 0 || cols == 0)
            raise(ErrorKind::Parse, "zero-sized parameter " + name + " in " + path);
        ckpt.params.add(name, read_mat(in, rows, cols));
        ckpt.first_moments.push_back(read_mat(in, rows, cols));
        ckpt.second_moments.push_back(read_mat(in, rows, cols));
        if (!in) raise(ErrorKind::Parse, "truncated checkpoint blob in " + path);
    }
    return ckpt;
}

}  // namespace temo::train
