#include "temo/field/fourier.hpp"

#include <cmath>

#include "temo/util/error.hpp"

namespace temo::field {

ad::Mat fourier_encode(const ad::Mat& x, int bands) {
    if (bands < 1) raise(ErrorKind::Config, "fourier_encode: bands must be >= 1");
    const std::size_t d = x.cols;
    ad::Mat out(x.rows, 2 * static_cast<std::size_t>(bands) * d);
    for (std::size_t r = 0; r < x.rows; ++r) {
        double* o = out.data.data() + r * out.cols;
        for (int k = 0; k < bands; ++k) {
            double freq = std::ldexp(M_PI, k);  // 2^k * pi
            for (std::size_t c = 0; c < d; ++c) {
                double v = freq * x.at(r, c);
                if (!std::isfinite(v))
                    raise(ErrorKind::Numeric, "fourier_encode: non-finite input");
                o[2 * static_cast<std::size_t>(k) * d + c] = std::sin(v);
                o[(2 * static_cast<std::size_t>(k) + 1) * d + c] = std::cos(v);
            }
        }
    }
    return out;
}

}  // namespace temo::field
