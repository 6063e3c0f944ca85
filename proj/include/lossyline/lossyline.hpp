// Umbrella header for the lossyline library.

#pragma once

#include "lossyline/bessel.hpp"
#include "lossyline/calibration.hpp"
#include "lossyline/dispersion.hpp"
#include "lossyline/fdtd.hpp"
#include "lossyline/kernels.hpp"
#include "lossyline/line_params.hpp"
#include "lossyline/linalg.hpp"
#include "lossyline/network.hpp"
#include "lossyline/quadrature.hpp"
#include "lossyline/reflections.hpp"
#include "lossyline/response.hpp"
#include "lossyline/waveform.hpp"
