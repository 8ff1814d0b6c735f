#pragma once

#include "depthgate/decision.hpp"
#include "depthgate/depth.hpp"
#include "depthgate/depth_functional.hpp"
#include "depthgate/depth_multivariate.hpp"
#include "depthgate/depth_univariate.hpp"
#include "depthgate/error.hpp"
#include "depthgate/io.hpp"
#include "depthgate/ls_core.hpp"
#include "depthgate/model.hpp"
#include "depthgate/numfmt.hpp"
#include "depthgate/rng.hpp"
#include "depthgate/simulate.hpp"
