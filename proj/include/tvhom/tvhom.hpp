#pragma once

// Umbrella header: exact total variation between heterogeneous product
// distributions via atomic-measure convolution, the homogenized counterpart
// via the multinomial reduction, explicit constants, and the verification
// harness that checks every inequality against independent oracles.

#include "tvhom/constants.hpp"
#include "tvhom/errors.hpp"
#include "tvhom/generator.hpp"
#include "tvhom/harness.hpp"
#include "tvhom/io.hpp"
#include "tvhom/measure.hpp"
#include "tvhom/numeric.hpp"
#include "tvhom/pmf.hpp"
#include "tvhom/product_tv.hpp"
#include "tvhom/random.hpp"
#include "tvhom/score.hpp"
#include "tvhom/search.hpp"
