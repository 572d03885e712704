#pragma once

#include "akx/algebra.hpp"
#include "akx/common.hpp"
#include "akx/io.hpp"
#include "akx/jet.hpp"
#include "akx/kernel.hpp"
#include "akx/linalg.hpp"
#include "akx/psd.hpp"
#include "akx/series.hpp"
