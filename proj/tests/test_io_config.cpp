#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "support.hpp"
#include "tpe/config.hpp"
#include "tpe/io.hpp"

using namespace tpe;
using namespace tpe::testing;
namespace fs = std::filesystem;

namespace {

nlohmann::json minimal_config() {
  return nlohmann::json::parse(R"({
    "mesh": {"generator": "split_interval", "n1": 4, "n2": 4},
    "problem": {"dim": 1, "mode": "single-domain",
                "subdomains": [{"G": {"type": "power", "kappa": 1, "p": 2}, "q": 4, "alpha": 1, "rho": 1}]}
  })");
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tpe_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.0), "-2");
  for (double x : {std::tanh(0.5), 1e-300, 6.02214076e23}) EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(FeFunctionJson, RoundTrip) {
  const FeSpace s = interval(8);
  std::mt19937_64 rng(1);
  const FeFunction u = random_state(s, rng);
  const auto j = fe_function_to_json(u, mesh_hash(s.mesh()));
  const FeFunction back = fe_function_from_json(nlohmann::json::parse(j.dump()), s.mesh());
  EXPECT_TRUE(back.values == u.values);
}

TEST(FeFunctionJson, RejectsForeignMeshAndWrongLength) {
  const FeSpace a = interval(8), b = interval(10);
  const FeFunction u = a.constant(1.0);
  EXPECT_THROW(fe_function_from_json(fe_function_to_json(u, mesh_hash(a.mesh())), b.mesh()), ParseError);
  auto j = fe_function_to_json(u, mesh_hash(a.mesh()));
  j["values"].erase(0);
  EXPECT_THROW(fe_function_from_json(j, a.mesh()), ParseError);
  EXPECT_THROW(fe_function_from_json(nlohmann::json::object(), a.mesh()), ParseError);
}

TEST(EigenpairJson, Fields) {
  const FeSpace s = interval(8);
  EigenPair p;
  p.u = s.constant(1.0);
  p.lambda = 0.5;
  p.method = "min-mr";
  p.converged = true;
  const auto j = eigenpair_to_json(p, mesh_hash(s.mesh()));
  for (const char* key : {"mesh_hash", "values", "lambda", "level", "residual_dual_norm", "residual_euclidean",
                          "method", "iterations", "success", "message"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["success"], true);
}

TEST(Csv, EigenfunctionColumns) {
  std::ostringstream one, two;
  const FeSpace a = interval(2);
  write_eigenfunction_csv(one, a.mesh(), a.constant(1.5));
  EXPECT_EQ(one.str(), "node_index,x,value\n0,0,1.5\n1,0.5,1.5\n2,1,1.5\n");
  const FeSpace b(generate_split_square(2, 2, 0.5));
  write_eigenfunction_csv(two, b.mesh(), b.constant(0.0));
  EXPECT_EQ(two.str().substr(0, two.str().find('\n')), "node_index,x,y,value");
}

TEST(Csv, HistoryAndSweep) {
  std::ostringstream h, sw, empty;
  write_history_csv(h, {{0, -1.0, 0.5, 2.0, 0.0, 1.0, 2.0, "descent"}, {1, -1.5, 1e-9, 2.0, 0.25, 1.0, 2.0, "newton"}});
  EXPECT_EQ(h.str(),
            "iter,phase,level,residual,lambda,step,h_value,h_pairing\n"
            "0,descent,-1,0.5,2,0,1,2\n1,newton,-1.5,1e-09,2,0.25,1,2\n");
  SweepReport rep;
  rep.rows.push_back({0.5, -0.1, 1e-9, 12, true, ""});
  write_sweep_csv(sw, rep);
  EXPECT_EQ(sw.str(), "lambda,level,residual,iters,success\n0.5,-0.1,1e-09,12,true\n");
  write_sweep_csv(empty, SweepReport{});
  EXPECT_EQ(empty.str(), "lambda,level,residual,iters,success\n");
  EXPECT_EQ(sweep_to_json(rep)["rows"].size(), 1u);
}

TEST(WriteText, ReportsFailure) {
  EXPECT_THROW(write_text("/nonexistent_dir_tpe/x.txt", "x"), Error);
  const fs::path dir = scratch_dir("write");
  write_text((dir / "a.txt").string(), "hello");
  std::ifstream in(dir / "a.txt");
  std::string s;
  std::getline(in, s);
  EXPECT_EQ(s, "hello");
}

TEST(Config, Defaults) {
  const RunConfig c = config_from_json(minimal_config());
  EXPECT_EQ(c.method, "min-mr");
  EXPECT_EQ(c.r, 1.0);
  EXPECT_FALSE(c.lambda.has_value());
  EXPECT_EQ(c.solver.tol, 1e-8);
  EXPECT_EQ(build_mesh(c.mesh).nodes.size(), 9u);
}

TEST(Config, TwoDimensionalDefaultTolerance) {
  auto j = minimal_config();
  j["mesh"] = {{"generator", "split_square"}, {"nx", 4}, {"ny", 4}};
  j["problem"]["dim"] = 2;
  EXPECT_EQ(config_from_json(j).solver.tol, 1e-6);
  j["solver"] = {{"tol", 1e-9}, {"parallel", true}};
  const RunConfig c = config_from_json(j);
  EXPECT_EQ(c.solver.tol, 1e-9);
  EXPECT_TRUE(c.solver.parallel_sweep);
}

TEST(Config, SolverOptionsRoundTrip) {
  SolverOptions o;
  o.seed = 77;
  o.path_points = 31;
  const SolverOptions back = solver_options_from_json(solver_options_to_json(o), 1);
  EXPECT_EQ(solver_options_to_json(back).dump(), solver_options_to_json(o).dump());
}

TEST(Config, Rejections) {
  auto both = minimal_config();
  both["mesh"]["file"] = "m.json";
  EXPECT_THROW(config_from_json(both), ParseError);
  auto none = minimal_config();
  none["mesh"] = nlohmann::json::object();
  EXPECT_THROW(config_from_json(none), ParseError);
  auto extra = minimal_config();
  extra["colour"] = 1;
  EXPECT_THROW(config_from_json(extra), ParseError);
  auto method = minimal_config();
  method["method"] = "simplex";
  EXPECT_THROW(config_from_json(method), ParseError);
  auto solver = minimal_config();
  solver["solver"] = {{"tolerance", 1e-3}};
  EXPECT_THROW(config_from_json(solver), ParseError);
  auto lambdas = minimal_config();
  lambdas["lambdas"] = "1,2";
  EXPECT_THROW(config_from_json(lambdas), ParseError);
}

TEST(Config, MeshGenerators) {
  MeshSource src;
  src.generator = "inner_square";
  src.params = {{"n_outer", 8}, {"n_inner", 4}};
  EXPECT_EQ(build_mesh(src).dim, 2);
  src.params = {{"n_outer", 8}, {"n_inner", 4}, {"nx", 2}};
  EXPECT_THROW(build_mesh(src), ParseError);
  src.generator = "torus";
  src.params = nlohmann::json::object();
  EXPECT_THROW(build_mesh(src), ParseError);
  src.generator = "split_interval";
  src.params = {{"n1", 2}};
  EXPECT_THROW(build_mesh(src), ParseError);
}

TEST(Config, MeshFileResolvedAgainstConfigDirectory) {
  const fs::path dir = scratch_dir("meshfile");
  write_text((dir / "m.json").string(), mesh_to_json(generate_split_interval(0, 0.5, 1, 3, 3)).dump());
  auto j = minimal_config();
  j["mesh"] = {{"file", "m.json"}};
  write_text((dir / "run.json").string(), j.dump());
  const RunConfig c = load_config(dir / "run.json");
  EXPECT_EQ(build_mesh(c.mesh).nodes.size(), 7u);
}

TEST(Config, MissingOrTruncatedFile) {
  EXPECT_THROW(load_config("/nonexistent_tpe/run.json"), ParseError);
  const fs::path dir = scratch_dir("trunc");
  const std::string text = minimal_config().dump();
  write_text((dir / "run.json").string(), text.substr(0, text.size() / 2));
  EXPECT_THROW(load_config(dir / "run.json"), ParseError);
}

TEST(Config, ShippedConfigsLoad) {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(TPE_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const RunConfig c = load_config(entry.path());
    const FeSpace s(build_mesh(c.mesh));
    EXPECT_NO_THROW(check_compatible(s, c.problem)) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 5);
}

TEST(LambdaList, Parsing) {
  EXPECT_EQ(parse_lambda_list("0.5, 1,2"), (std::vector<double>{0.5, 1.0, 2.0}));
  EXPECT_TRUE(parse_lambda_list("").empty());
  EXPECT_TRUE(parse_lambda_list(" , ").empty());
  EXPECT_THROW(parse_lambda_list("a"), ParseError);
  EXPECT_THROW(parse_lambda_list("1x"), ParseError);
}
