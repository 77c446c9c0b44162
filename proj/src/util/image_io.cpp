#include "temo/util/image_io.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "temo/util/error.hpp"

namespace temo::util {
namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               const std::vector<std::uint8_t>& payload) {
    put_u32(out, static_cast<std::uint32_t>(payload.size()));
    std::size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    uLong crc = crc32(0L, out.data() + start, static_cast<uInt>(4 + payload.size()));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

void write_png(const std::string& path, const std::vector<std::uint8_t>& pixels,
               std::size_t h, std::size_t w, int channels) {
    if (h == 0 || w == 0) raise(ErrorKind::Config, "png: empty image");
    if (pixels.size() != h * w * static_cast<std::size_t>(channels))
        raise(ErrorKind::Internal, "png: pixel buffer size mismatch");

    // filter byte 0 per scanline
    std::vector<std::uint8_t> raw;
    raw.reserve(h * (w * static_cast<std::size_t>(channels) + 1));
    for (std::size_t y = 0; y < h; ++y) {
        raw.push_back(0);
        const std::uint8_t* row = pixels.data() + y * w * static_cast<std::size_t>(channels);
        raw.insert(raw.end(), row, row + w * static_cast<std::size_t>(channels));
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> deflated(bound);
    if (compress2(deflated.data(), &bound, raw.data(),
                  static_cast<uLong>(raw.size()), 9) != Z_OK)
        raise(ErrorKind::Internal, "png: deflate failed");
    deflated.resize(bound);

    std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(w));
    put_u32(ihdr, static_cast<std::uint32_t>(h));
    ihdr.push_back(8);                                    // bit depth
    ihdr.push_back(channels == 3 ? 2 : 0);                // rgb or gray
    ihdr.push_back(0);                                    // deflate
    ihdr.push_back(0);                                    // filter method
    ihdr.push_back(0);                                    // no interlace
    put_chunk(png, "IHDR", ihdr);
    put_chunk(png, "IDAT", deflated);
    put_chunk(png, "IEND", {});

    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::Io, "cannot write " + path);
    out.write(reinterpret_cast<const char*>(png.data()),
              static_cast<std::streamsize>(png.size()));
    if (!out) raise(ErrorKind::Io, "short write on " + path);
}

std::uint8_t encode_channel(double v) {
    v = std::fmin(std::fmax(v, 0.0), 1.0);
    v = std::pow(v, 1.0 / 2.2);
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

}  // namespace

void write_png_rgb(const std::string& path, const std::vector<double>& rgb,
                   std::size_t h, std::size_t w) {
    if (rgb.size() != h * w * 3)
        raise(ErrorKind::Internal, "write_png_rgb: buffer size mismatch");
    std::vector<std::uint8_t> px(h * w * 3);
    for (std::size_t i = 0; i < rgb.size(); ++i) px[i] = encode_channel(rgb[i]);
    write_png(path, px, h, w, 3);
}

void write_png_mask(const std::string& path,
                    const std::vector<std::uint8_t>& mask, std::size_t h,
                    std::size_t w) {
    if (mask.size() != h * w)
        raise(ErrorKind::Internal, "write_png_mask: buffer size mismatch");
    std::vector<std::uint8_t> px(h * w);
    for (std::size_t i = 0; i < mask.size(); ++i) px[i] = mask[i] ? 255 : 0;
    write_png(path, px, h, w, 1);
}

void write_raw_float(const std::string& path, const std::vector<double>& data,
                     std::size_t h, std::size_t w, std::size_t channels) {
    if (data.size() != h * w * channels)
        raise(ErrorKind::Internal, "write_raw_float: buffer size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::Io, "cannot write " + path);
    out.write("TEMORAWF", 8);
    auto put = [&](std::uint32_t v) {
        out.write(reinterpret_cast<const char*>(&v), 4);  // little endian host
    };
    put(static_cast<std::uint32_t>(h));
    put(static_cast<std::uint32_t>(w));
    put(static_cast<std::uint32_t>(channels));
    std::vector<float> f(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) f[i] = static_cast<float>(data[i]);
    out.write(reinterpret_cast<const char*>(f.data()),
              static_cast<std::streamsize>(f.size() * 4));
    if (!out) raise(ErrorKind::Io, "short write on " + path);
}

}  // namespace temo::util
