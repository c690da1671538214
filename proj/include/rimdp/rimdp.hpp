#pragma once

// Umbrella header for the rimdp library: robust value iteration, strategy
// synthesis and interchange formats for interval Markov decision processes.

#include "rimdp/bellman.hpp"
#include "rimdp/csc.hpp"
#include "rimdp/errors.hpp"
#include "rimdp/imdp.hpp"
#include "rimdp/interval.hpp"
#include "rimdp/io/bmdp.hpp"
#include "rimdp/io/convert.hpp"
#include "rimdp/io/native.hpp"
#include "rimdp/io/prism.hpp"
#include "rimdp/numeric.hpp"
#include "rimdp/omax.hpp"
#include "rimdp/parallel.hpp"
#include "rimdp/property.hpp"
#include "rimdp/random_model.hpp"
#include "rimdp/solver.hpp"
