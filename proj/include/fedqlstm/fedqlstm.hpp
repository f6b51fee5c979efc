#pragma once

// Umbrella header for the whole library.

#include "fedqlstm/errors.hpp"
#include "fedqlstm/federated.hpp"
#include "fedqlstm/harness.hpp"
#include "fedqlstm/lstm.hpp"
#include "fedqlstm/optim.hpp"
#include "fedqlstm/params.hpp"
#include "fedqlstm/qlstm.hpp"
#include "fedqlstm/rng.hpp"
#include "fedqlstm/serialize.hpp"
#include "fedqlstm/statevector.hpp"
#include "fedqlstm/targets.hpp"
#include "fedqlstm/vqc.hpp"
