#pragma once

#include "kslab/burgers.hpp"
#include "kslab/config.hpp"
#include "kslab/csv.hpp"
#include "kslab/entropy.hpp"
#include "kslab/estimates.hpp"
#include "kslab/fft.hpp"
#include "kslab/grid.hpp"
#include "kslab/io.hpp"
#include "kslab/limit.hpp"
#include "kslab/params.hpp"
#include "kslab/solver.hpp"
