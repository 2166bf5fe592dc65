#pragma once

#include "kdual/core/error.hpp"
#include "kdual/core/linalg.hpp"
#include "kdual/core/numeric.hpp"
#include "kdual/core/rational.hpp"
#include "kdual/cost.hpp"
#include "kdual/diagnostics.hpp"
#include "kdual/experiment.hpp"
#include "kdual/families.hpp"
#include "kdual/lp_oracle.hpp"
#include "kdual/minimize.hpp"
#include "kdual/mumford.hpp"
#include "kdual/polyhedral.hpp"
#include "kdual/series.hpp"
#include "kdual/transport.hpp"
#include "kdual/tropical.hpp"
