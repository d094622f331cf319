#include <doctest.h>
#include "qlie/qlie.hpp"
TEST_CASE("placeholder") { CHECK(true); }
