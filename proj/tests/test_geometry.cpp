#include <gtest/gtest.h>

#include "tpe/geometry.hpp"

using namespace tpe;

TEST(SplitInterval, CountsAndInterfaceNode) {
  const Mesh m = generate_split_interval(0.0, 0.5, 1.0, 2, 2);
  EXPECT_EQ(m.dim, 1);
  EXPECT_EQ(m.nodes.size(), 5u);
  EXPECT_EQ(m.elements.size(), 4u);
  ASSERT_EQ(m.interface.size(), 1u);
  EXPECT_DOUBLE_EQ(m.nodes[m.interface[0].nodes[0]][0], 0.5);
}

TEST(SplitInterval, Measures) {
  const TagMeasures t = validate_mesh(generate_split_interval(0.0, 0.5, 1.0, 2, 2));
  EXPECT_DOUBLE_EQ(t.omega1, 0.5);
  EXPECT_DOUBLE_EQ(t.omega2, 0.5);
  EXPECT_DOUBLE_EQ(t.sigma, 1.0);
  EXPECT_DOUBLE_EQ(t.gamma1, 1.0);
  EXPECT_DOUBLE_EQ(t.gamma2, 1.0);
}

TEST(SplitInterval, RejectsBadOrdering) {
  EXPECT_THROW(generate_split_interval(0.0, 1.0, 0.5, 2, 2), InvalidGeometry);
  EXPECT_THROW(generate_split_interval(0.0, 0.5, 1.0, 0, 2), InvalidGeometry);
}

TEST(SplitSquare, MeasuresAndCounts) {
  const Mesh m = generate_split_square(4, 4, 0.5);
  EXPECT_EQ(m.elements.size(), 32u);
  int left = 0;
  for (const auto& e : m.elements) left += e.sub == 1 ? 1 : 0;
  EXPECT_EQ(left, 16);
  const TagMeasures t = validate_mesh(m);
  EXPECT_NEAR(t.sigma, 1.0, 1e-14);
  EXPECT_NEAR(t.omega1, 0.5, 1e-14);
  EXPECT_NEAR(t.omega2, 0.5, 1e-14);
  EXPECT_NEAR(t.gamma1 + t.gamma2, 4.0, 1e-14);
}

TEST(SplitSquare, RejectsOffGridInterface) { EXPECT_THROW(generate_split_square(4, 4, 0.3), InvalidGeometry); }

TEST(InnerSquare, MeasuresAndNoGamma2) {
  const Mesh m = generate_inner_square(8, 4);
  const TagMeasures t = validate_mesh(m);
  EXPECT_EQ(t.gamma2, 0.0);
  EXPECT_NEAR(t.sigma, 2.0, 1e-14);
  EXPECT_NEAR(t.omega2, 0.25, 1e-14);
  EXPECT_NEAR(t.gamma1, 4.0, 1e-14);
  for (const auto& b : m.boundary) EXPECT_EQ(b.tag, BoundaryTag::Gamma1);
}

TEST(InnerSquare, RejectsIncompatibleGrids) {
  EXPECT_THROW(generate_inner_square(8, 3), InvalidGeometry);
  EXPECT_THROW(generate_inner_square(6, 3), InvalidGeometry);
}

TEST(Validate, UnknownSubdomainTag) {
  Mesh m = generate_split_interval(0.0, 0.5, 1.0, 2, 2);
  m.elements[0].sub = 3;
  try {
    validate_mesh(m);
    FAIL() << "expected a validation error";
  } catch (const MeshValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown subdomain tag"), std::string::npos);
  }
}

TEST(Validate, EmptyInterface) {
  Mesh m = generate_split_interval(0.0, 0.5, 1.0, 2, 2);
  m.interface.clear();
  try {
    validate_mesh(m);
    FAIL() << "expected a validation error";
  } catch (const MeshValidationError& e) {
    EXPECT_STREQ(e.what(), "empty interface");
  }
}

TEST(Validate, DegenerateAndOrphan) {
  Mesh m = generate_split_interval(0.0, 0.5, 1.0, 2, 2);
  m.nodes[1] = m.nodes[0];
  EXPECT_THROW(validate_mesh(m), MeshValidationError);
  Mesh o = generate_split_interval(0.0, 0.5, 1.0, 2, 2);
  o.nodes.push_back({2.0, 0.0});
  EXPECT_THROW(validate_mesh(o), MeshValidationError);
}

TEST(Validate, BoundaryMustPartition) {
  Mesh m = generate_split_square(4, 4, 0.5);
  m.boundary.pop_back();
  EXPECT_THROW(validate_mesh(m), MeshValidationError);
  Mesh t = generate_split_square(4, 4, 0.5);
  t.boundary.front().tag = t.boundary.front().tag == BoundaryTag::Gamma1 ? BoundaryTag::Gamma2 : BoundaryTag::Gamma1;
  EXPECT_THROW(validate_mesh(t), MeshValidationError);
}

TEST(Validate, MeasuresAddUp) {
  for (const Mesh& m : {generate_split_interval(-1.0, 0.25, 2.0, 7, 5), generate_split_square(8, 6, 0.25),
                        generate_inner_square(12, 6)}) {
    const TagMeasures t = validate_mesh(m);
    double total = 0.0;
    for (const auto& e : m.elements) total += element_measure(m, e);
    EXPECT_NEAR(t.omega(), total, 1e-12 * total);
  }
}

TEST(Validate, RefinementPreservesMeasures) {
  const TagMeasures a = validate_mesh(generate_split_square(4, 4, 0.5));
  const TagMeasures b = validate_mesh(generate_split_square(8, 8, 0.5));
  EXPECT_NEAR(a.omega1, b.omega1, 1e-13);
  EXPECT_NEAR(a.sigma, b.sigma, 1e-13);
  EXPECT_NEAR(a.gamma1, b.gamma1, 1e-13);
  const TagMeasures c = validate_mesh(generate_inner_square(8, 4));
  const TagMeasures d = validate_mesh(generate_inner_square(16, 8));
  EXPECT_NEAR(c.omega2, d.omega2, 1e-13);
  EXPECT_NEAR(c.sigma, d.sigma, 1e-13);
}

TEST(MeshJson, RoundTripIsExact) {
  for (const Mesh& m : {generate_split_interval(0.0, 1.0 / 3.0, 1.0, 3, 4), generate_split_square(4, 4, 0.5),
                        generate_inner_square(8, 4)}) {
    const Mesh back = mesh_from_json(nlohmann::json::parse(mesh_to_json(m).dump()));
    EXPECT_EQ(back, m);
    EXPECT_EQ(mesh_hash(back), mesh_hash(m));
  }
}

TEST(MeshJson, HashDistinguishesMeshes) {
  EXPECT_NE(mesh_hash(generate_split_square(4, 4, 0.5)), mesh_hash(generate_split_square(4, 4, 0.25)));
  EXPECT_EQ(mesh_hash(generate_split_square(4, 4, 0.5)).size(), 16u);
}
