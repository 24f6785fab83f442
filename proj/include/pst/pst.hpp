#pragma once

#include "pst/analytic.hpp"
#include "pst/array.hpp"
#include "pst/detectors.hpp"
#include "pst/error.hpp"
#include "pst/kernel.hpp"
#include "pst/presets.hpp"
#include "pst/spectral.hpp"
#include "pst/synth.hpp"
#include "pst/transform.hpp"
