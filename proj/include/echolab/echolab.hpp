#pragma once

#include "core.hpp"
#include "parallel.hpp"
#include "single_layer.hpp"
#include "multi_layer.hpp"
#include "fdm.hpp"
#include "inverse.hpp"
#include "io.hpp"
