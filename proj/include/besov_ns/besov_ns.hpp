#pragma once

#include "besov_ns/grid.hpp"
#include "besov_ns/field.hpp"
#include "besov_ns/fft.hpp"
#include "besov_ns/spectral_ops.hpp"
#include "besov_ns/littlewood_paley.hpp"
#include "besov_ns/norms.hpp"
#include "besov_ns/paraproduct.hpp"
#include "besov_ns/time_trace.hpp"
#include "besov_ns/oseen.hpp"
#include "besov_ns/mild_solver.hpp"
#include "besov_ns/initial_fields.hpp"
#include "besov_ns/report.hpp"
#include "besov_ns/criteria.hpp"
#include "besov_ns/constants.hpp"
#include "besov_ns/calibration.hpp"
#include "besov_ns/io.hpp"
