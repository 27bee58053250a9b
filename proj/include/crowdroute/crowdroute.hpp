#pragma once

#include "crowdroute/errors.hpp"
#include "crowdroute/instance.hpp"
#include "crowdroute/plan.hpp"
#include "crowdroute/features.hpp"
#include "crowdroute/reward.hpp"
#include "crowdroute/rules.hpp"
#include "crowdroute/actions.hpp"
#include "crowdroute/profile.hpp"
#include "crowdroute/baselines.hpp"
#include "crowdroute/dqn/mlp.hpp"
#include "crowdroute/dqn/replay_buffer.hpp"
#include "crowdroute/dqn/environment.hpp"
#include "crowdroute/dqn/model.hpp"
#include "crowdroute/dqn/trainer.hpp"
#include "crowdroute/dqn/solver.hpp"
#include "crowdroute/benchmark.hpp"
