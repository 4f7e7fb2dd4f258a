#pragma once

#include "qlyap/dynamics.hpp"
#include "qlyap/errors.hpp"
#include "qlyap/exponents.hpp"
#include "qlyap/identities.hpp"
#include "qlyap/io.hpp"
#include "qlyap/linalg.hpp"
#include "qlyap/ncpoly.hpp"
#include "qlyap/quantum_analysis.hpp"
#include "qlyap/random.hpp"
#include "qlyap/run.hpp"
