#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "ddestab/json_io.hpp"

using namespace ddestab;

namespace {

std::string data(const char* name) { return std::string(DDESTAB_DATA_DIR) + "/" + name; }

const DelayDistribution kFig1(DiscreteAtoms({{0.8, 0.625}, {0.2, 3.5}}));

GammaMixture mixture() {
  return GammaMixture({{0.6, GammaKernel(3, 2.0)}, {0.4, GammaKernel(5, 4.0)}});
}

}  // namespace

TEST(JsonDistribution, RoundTrip) {
  for (const auto& d : {kFig1, DelayDistribution(mixture()), DelayDistribution(mixture(), 1.7),
                        DelayDistribution::single(0.0), DelayDistribution::single(std::acos(-1.0) / 3.0),
                        DelayDistribution(DiscreteAtoms({{0.1, 0.3}, {0.9, 2.0 / 3.0}}), 0.3)}) {
    EXPECT_EQ(distribution_from_json(to_json(d)), d) << to_json(d);
  }
}

TEST(JsonDistribution, Schema) {
  const auto d = distribution_from_json(R"({"type":"discrete","atoms":[[0.5,1],[0.5,3]]})");
  EXPECT_NEAR(mean(d), 2.0, 1e-15);
  EXPECT_EQ(d.scale(), 1.0);
  const auto g = distribution_from_json(R"({"type":"gamma_mixture","components":[[1,4,2]],"scale":0.5})");
  EXPECT_NEAR(mean(g), 1.0, 1e-15);
  EXPECT_TRUE(g.is_mixture());
}

TEST(JsonDistribution, Malformed) {
  EXPECT_THROW(distribution_from_json("{"), JsonError);
  EXPECT_THROW(distribution_from_json(R"({"atoms":[[1,1]]})"), JsonError);
  EXPECT_THROW(distribution_from_json(R"({"type":"lognormal"})"), JsonError);
  EXPECT_THROW(distribution_from_json(R"({"type":"discrete","atoms":[[1]]})"), JsonError);
  EXPECT_THROW(distribution_from_json(R"({"type":"discrete","atoms":[["a",1]]})"), JsonError);
  EXPECT_THROW(distribution_from_json(R"({"type":"gamma_mixture","components":[[1,2.5,1]]})"), JsonError);
  EXPECT_THROW(distribution_from_json(R"({"type":"discrete","atoms":[[1,1]],"scale":-1})"), JsonError);
  // a well-formed file with an invalid distribution is still a usage error
  EXPECT_THROW(distribution_from_json(R"({"type":"discrete","atoms":[[0.5,1]]})"), std::invalid_argument);
}

TEST(JsonDistribution, ArgumentForms) {
  EXPECT_EQ(parse_distribution_arg("single:2.0"), DelayDistribution::single(2.0));
  EXPECT_EQ(parse_distribution_arg(data("fig1.json")), kFig1);
  EXPECT_EQ(parse_distribution_arg(to_json(kFig1)), kFig1);
  EXPECT_THROW(parse_distribution_arg("single:2x"), JsonError);
  EXPECT_THROW(parse_distribution_arg("single:"), JsonError);
  EXPECT_THROW(parse_distribution_arg("/nonexistent/file.json"), JsonError);
}

TEST(JsonRoots, RoundTrip) {
  const auto rep = rightmost_root(CharacteristicProblem(-0.5, 1.0, kFig1));
  EXPECT_EQ(root_report_from_json(to_json(rep)), rep);
  const auto mix = rightmost_root(CharacteristicProblem(0.5, 1.0, DelayDistribution(mixture())));
  EXPECT_EQ(root_report_from_json(to_json(mix)), mix);
}

TEST(JsonVerdict, RoundTrip) {
  for (auto [a, b] : {std::pair{1.0, 0.5}, {-0.5, 1.0}, {-2.0, 1.0}, {0.0, 1.6}}) {
    const auto v = classify(CharacteristicProblem(a, b, kFig1));
    EXPECT_EQ(verdict_from_json(to_json(v)), v) << to_json(v);
  }
  EXPECT_THROW(verdict_from_json(R"({"region":"nowhere"})"), JsonError);
}

TEST(JsonSweep, RoundTrip) {
  const auto s = cs_sweep(-0.5, kFig1);
  EXPECT_EQ(sweep_result_from_json(to_json(s)), s);
}

TEST(JsonExtremal, RoundTrip) {
  ExtremalReport r;
  r.a = -0.5;
  r.mean = 1.2;
  r.omega_s = 0.8308;
  r.f_star = extremal_f_star(r.a, r.mean, r.omega_s);
  r.chord = extremal_given_u(-0.5, 0.9969, 0.5192);
  EXPECT_EQ(extremal_report_from_json(to_json(r)), r);
  ExtremalReport bad;
  bad.f_star_error = "infeasible";
  EXPECT_EQ(extremal_report_from_json(to_json(bad)), bad);
}

TEST(JsonHemato, ConfigFile) {
  const auto cfg = hemato_config_from_json(read_text_file(data("fig3.json")));
  EXPECT_EQ(cfg.points.size(), 6u);
  EXPECT_EQ(cfg.model.lineages.size(), 3u);
  EXPECT_NEAR(cfg.model.mean_delay(), 2.0, 1e-14);
  const auto vi = cfg.at("vi");
  EXPECT_EQ(vi.r, 1.3);
  EXPECT_EQ(vi.h, 1.9);
  EXPECT_THROW(cfg.at("vii"), std::invalid_argument);
  EXPECT_EQ(hemato_config_from_json(to_json(cfg)), cfg);
  EXPECT_EQ(hemato_model_from_json(to_json(cfg.model)), cfg.model);
}

TEST(JsonHemato, VerdictsRoundTrip) {
  const auto cfg = hemato_config_from_json(read_text_file(data("fig3.json")));
  for (const auto& [name, rh] : cfg.points) {
    const auto v = hemato_verdict(cfg.at(name));
    EXPECT_EQ(steady_verdicts_from_json(to_json(v)), v) << name;
  }
}

TEST(JsonChart, RoundTrip) {
  ChartJob job;
  job.na = 5;
  job.nb = 4;
  const auto c = compute_chart(kFig1, job);
  EXPECT_EQ(chart_from_json(to_json(c)), c);
}
