#pragma once

#include "temo/ad/tape.hpp"

namespace temo::field {

// Positional encoding of data inputs: per band k = 0..bands-1, the block
// [sin(2^k pi x), cos(2^k pi x)] over all columns, blocks concatenated in
// band order. [n x d] -> [n x 2*bands*d]. Inputs carry no gradient in this
// pipeline, so the encoding is computed off-tape.
ad::Mat fourier_encode(const ad::Mat& x, int bands);

}  // namespace temo::field
