#pragma once

// Umbrella header: compressed matrix multiplication over small prime
// fields by packing several residues per machine word.

#include "qgemm/bench.hpp"
#include "qgemm/errors.hpp"
#include "qgemm/field.hpp"
#include "qgemm/gemm.hpp"
#include "qgemm/matrix.hpp"
#include "qgemm/matrix_io.hpp"
#include "qgemm/pack.hpp"
#include "qgemm/plan.hpp"
#include "qgemm/prng.hpp"
#include "qgemm/verify.hpp"
#include "qgemm/word.hpp"
