#pragma once

#include "ltft/error.hpp"
#include "ltft/window.hpp"
#include "ltft/quadrature.hpp"
#include "ltft/signal.hpp"
#include "ltft/frames.hpp"
#include "ltft/frame_filter.hpp"
#include "ltft/phase_space.hpp"
#include "ltft/dense.hpp"
#include "ltft/pipelines.hpp"
#include "ltft/verify.hpp"
#include "ltft/wav.hpp"
#include "ltft/config.hpp"
