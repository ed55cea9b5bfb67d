#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include <tcqlf/constellation.hpp>

using namespace tcqlf;
using cx = std::complex<double>;

TEST_SUITE("constellation") {

TEST_CASE("qpsk points are the fourth roots of unity") {
  const auto pts = psk_points(4);
  REQUIRE(pts.size() == 4);
  CHECK(std::abs(pts[0] - cx(1, 0)) < 1e-15);
  CHECK(std::abs(pts[1] - cx(0, 1)) < 1e-15);
  CHECK(std::abs(pts[2] - cx(-1, 0)) < 1e-15);
  CHECK(std::abs(pts[3] - cx(0, -1)) < 1e-15);
}

TEST_CASE("8psk points are unit magnitude, equally spaced") {
  const auto pts = psk_points(8);
  REQUIRE(pts.size() == 8);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(pts[1] - cx(inv_sqrt2, inv_sqrt2)) < 1e-15);
  for (int k = 0; k < 8; ++k) {
    CHECK(std::abs(std::abs(pts[k]) - 1.0) < 1e-15);
    const double expected_angle = 2.0 * M_PI * k / 8.0;
    const double angle = std::arg(pts[k]);
    const double wrapped =
        std::remainder(angle - expected_angle, 2.0 * M_PI);
    CHECK(std::abs(wrapped) < 1e-12);
  }
}

TEST_CASE("unsupported alphabet sizes are rejected") {
  CHECK_THROWS_AS(psk_points(3), std::invalid_argument);
  CHECK_THROWS_AS(psk_points(0), std::invalid_argument);
  CHECK_THROWS_AS(psk_points(16), std::invalid_argument);
}

TEST_CASE("first-interval and spatial scales are 1/sqrt(M)") {
  CHECK(initial_scale(100) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(initial_scale(4) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(spatial_scale(100) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(spatial_scale(64) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK_THROWS_AS(initial_scale(0), std::invalid_argument);
  CHECK_THROWS_AS(spatial_scale(-1), std::invalid_argument);
}

TEST_CASE("tracking scale matches sqrt(pi*(1-eps)/(2M))") {
  // Frozen value for the headline scenario: 100 antennas, coefficient
  // 0.9881 (pedestrian speed at 2.5 GHz, 5 ms intervals).
  CHECK(differential_scale(0.9881, 100) ==
        doctest::Approx(0.013672).epsilon(1e-4));
  // Closed form at an exactly representable argument.
  CHECK(differential_scale(0.5, 8) ==
        doctest::Approx(std::sqrt(M_PI * 0.5 / 16.0)).epsilon(1e-12));
  // A static channel needs no tracking step at all.
  CHECK(differential_scale(1.0, 100) == 0.0);
}

TEST_CASE("tracking scale decreases with correlation") {
  double prev = differential_scale(0.0, 100);
  for (double eps : {0.2, 0.5, 0.8, 0.95, 0.999}) {
    const double s = differential_scale(eps, 100);
    CHECK(s < prev);
    prev = s;
  }
}

TEST_CASE("tracking scale validates arguments") {
  CHECK_THROWS_AS(differential_scale(-0.1, 100), std::invalid_argument);
  CHECK_THROWS_AS(differential_scale(1.1, 100), std::invalid_argument);
  CHECK_THROWS_AS(differential_scale(0.5, 0), std::invalid_argument);
}

TEST_CASE("temporal scales bundle both quantities") {
  const ScaleParams p = temporal_scales(0.9881, 100);
  CHECK(p.first_interval == initial_scale(100));
  CHECK(p.tracking == differential_scale(0.9881, 100));
}

TEST_CASE("transform is the exact affine map scale*base + center") {
  const cx base(0.6, -0.8);
  const cx center(-1.5, 2.0);
  const double scale = 0.013672;
  const cx got = transform_point(base, center, scale);
  CHECK(got.real() == scale * base.real() + center.real());
  CHECK(got.imag() == scale * base.imag() + center.imag());

  const auto pts = psk_points(4);
  const auto moved = transform_constellation(pts, center, scale);
  REQUIRE(moved.size() == pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k)
    CHECK(moved[k] == transform_point(pts[k], center, scale));
}

}  // TEST_SUITE
