#pragma once

#include "slce/version.hpp"
#include "slce/errors.hpp"
#include "slce/dataset.hpp"
#include "slce/linalg.hpp"
#include "slce/slce.hpp"
#include "slce/knn.hpp"
#include "slce/baselines.hpp"
#include "slce/serialize.hpp"
#include "slce/svg.hpp"
#include "slce/harness.hpp"
