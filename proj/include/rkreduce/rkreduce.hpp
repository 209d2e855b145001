#pragma once

#include "rkreduce/applications.hpp"
#include "rkreduce/diagnostics.hpp"
#include "rkreduce/distributions.hpp"
#include "rkreduce/quadrature.hpp"
#include "rkreduce/reductions.hpp"
#include "rkreduce/rejection.hpp"
#include "rkreduce/rng.hpp"
#include "rkreduce/signed_kernels.hpp"
#include "rkreduce/special.hpp"
