#pragma once

#include "pcbf/algo/algorithm.hpp"
#include "pcbf/algo/policies.hpp"
#include "pcbf/algo/serialization.hpp"
#include "pcbf/campaign/runner.hpp"
#include "pcbf/campaign/yield.hpp"
#include "pcbf/cli/run_config.hpp"
#include "pcbf/core/errors.hpp"
#include "pcbf/core/jsonio.hpp"
#include "pcbf/core/rng.hpp"
#include "pcbf/core/vec2.hpp"
#include "pcbf/env/config.hpp"
#include "pcbf/env/env.hpp"
#include "pcbf/env/scene.hpp"
#include "pcbf/env/vec_env.hpp"
#include "pcbf/ops/atomic_write.hpp"
#include "pcbf/ops/audit.hpp"
#include "pcbf/ops/canonical.hpp"
#include "pcbf/ops/dataset.hpp"
#include "pcbf/ops/forensics.hpp"
#include "pcbf/ops/hash.hpp"
#include "pcbf/ops/prereg.hpp"
#include "pcbf/ops/watchdog.hpp"
#include "pcbf/pipeline/rollout.hpp"
#include "pcbf/pipeline/safety_wrapper.hpp"
#include "pcbf/safety/barriers.hpp"
#include "pcbf/safety/filter.hpp"
#include "pcbf/safety/projection.hpp"
#include "pcbf/safety/types.hpp"
