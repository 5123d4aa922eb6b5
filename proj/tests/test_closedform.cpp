#include <doctest.h>

#include "gradstorm/closedform.hpp"
#include "gradstorm/errors.hpp"

using namespace gradstorm;

TEST_CASE("burgers and uniform values") {
    CHECK(closedform::burgers_linear(-1.0, 0.5, 1.0) == -2.0);
    CHECK(closedform::uniform_mean(-1.0, 0.5, 1.0) == -2.0);
    CHECK_THROWS_AS(closedform::burgers_linear(-1.0, 1.0, 1.0), SingularTime);
}

TEST_CASE("gaussian closed form") {
    // At t = T = 1: 3 r^2 sigma^2 x / (2 r^2 sigma^2) = 1.5 x.
    CHECK(closedform::gaussian_mean(-1.0, 1.0, 1.0, 1.0, 2.0) == doctest::Approx(3.0));
    CHECK(closedform::gaussian_slope(-1.0, 1.0, 1.0, 1.0) == doctest::Approx(1.5));
    // Reduces to Burgers as sigma -> 0 and to u0 at t = 0.
    CHECK(closedform::gaussian_mean(-1.0, 1.0, 1e-9, 0.5, 1.0) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(closedform::gaussian_mean(-0.7, 2.0, 1.0, 0.0, 3.0) == doctest::Approx(-2.1));
    CHECK(closedform::gaussian_mean(-1.0, 1.0, 1.0, 0.7, 0.3) ==
          doctest::Approx(0.3 * closedform::gaussian_slope(-1.0, 1.0, 1.0, 0.7)));
}
