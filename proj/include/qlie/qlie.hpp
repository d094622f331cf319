// qlie.hpp -- umbrella header.

#pragma once

#include "qlie/scalar.hpp"
#include "qlie/tensor.hpp"
#include "qlie/words.hpp"
#include "qlie/instance.hpp"
#include "qlie/evaluator.hpp"
#include "qlie/lie.hpp"
#include "qlie/report.hpp"
