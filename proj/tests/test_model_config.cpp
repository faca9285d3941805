#include "segdist/errors.hpp"
#include "segdist/model_config.hpp"

#include <doctest.h>

#include <sstream>

using namespace segdist;

namespace {

ModelConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_model_config(in);
}

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("config with explicit model blocks") {
  const ModelConfig c = parse(
      "# two planar models\n"
      "model=planar\n"
      "sigma2=0.1\n"
      "tau2=1e4\n"
      "\n"
      "model = planar\n"
      "sigma2 = 2\n"
      "p0=0.3\n"
      "n=20\n");
  REQUIRE(c.models.size() == 2);
  CHECK(c.models[0].noise_variance == 0.1);
  CHECK(c.models[0].prior_scale == 1e4);
  CHECK(c.models[1].noise_variance == 2.0);
  CHECK(c.p0 == 0.3);
  CHECK(c.options.at("n") == "20");
  CHECK(c.prior().p0 == doctest::Approx(0.3));
}

TEST_CASE("config defaults and implicit block") {
  const ModelConfig empty = parse("# nothing\n");
  CHECK(empty.models.empty());
  CHECK_FALSE(empty.p0.has_value());
  CHECK(empty.prior().p0 == 0.5);
  const ModelConfig implicit = parse("sigma2=0.5\n");
  REQUIRE(implicit.models.size() == 1);
  CHECK(implicit.models[0].noise_variance == 0.5);
}

TEST_CASE("config errors carry the line") {
  CHECK(error_line("sigma2=0.1\nsigma2=0.2\n") == 2);
  CHECK(error_line("model=spline\n") == 1);
  CHECK(error_line("sigma2=-1\n") == 1);
  CHECK(error_line("tau2=inf\n") == 1);
  CHECK(error_line("p0=1\n") == 1);
  CHECK(error_line("p0=0.2\np0=0.3\n") == 2);
  CHECK(error_line("# ok\nno equals sign\n") == 2);
  CHECK(error_line("n=1\nn=2\n") == 2);
  CHECK(error_line("=3\n") == 1);
  CHECK_THROWS_AS(read_model_config("/nonexistent/segdist.cfg"), InputError);
}
