#pragma once

#include "nsar/algorithms.hpp"
#include "nsar/bandit.hpp"
#include "nsar/complexity.hpp"
#include "nsar/error.hpp"
#include "nsar/harness.hpp"
#include "nsar/io.hpp"
#include "nsar/replication.hpp"
#include "nsar/seed.hpp"
