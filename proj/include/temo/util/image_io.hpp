#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace temo::util {

// 8-bit RGB PNG from row-major linear radiance [h*w*3]; values are clamped
// to [0,1] and gamma-encoded (1/2.2) at this boundary only.
void write_png_rgb(const std::string& path, const std::vector<double>& rgb,
                   std::size_t h, std::size_t w);

// 8-bit grayscale PNG from a 0/1 mask [h*w] (nonzero -> white).
void write_png_mask(const std::string& path,
                    const std::vector<std::uint8_t>& mask, std::size_t h,
                    std::size_t w);

// Raw linear float dump: magic "TEMORAWF", u32 h, w, channels (little
// endian), then float32 row-major data. Keeps full precision for tooling.
void write_raw_float(const std::string& path, const std::vector<double>& data,
                     std::size_t h, std::size_t w, std::size_t channels);

}  // namespace temo::util
