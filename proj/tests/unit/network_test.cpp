#include <gtest/gtest.h>

#include <cmath>

#include <cycleflow/error.hpp>
#include <cycleflow/network.hpp>

using namespace cycleflow;

namespace {

SignalProgram two_phase(double amber = 0.0) {
  SignalProgram p;
  p.node = "C";
  p.phases = {{30.0, {"in_N", "in_S"}}, {30.0, {"in_E", "in_W"}}};
  p.amber = amber;
  return p;
}

double route_length(const Network& net, const std::vector<std::string>& route) {
  double len = 0.0;
  for (std::size_t i = 1; i + 1 < route.size(); ++i) len += net.edge(route[i]).length;
  return len;
}

}  // namespace

TEST(Corridor, SingleBikeLane) {
  const auto net = build_straight_corridor(1528.0);
  ASSERT_EQ(net.edges.size(), 1u);
  EXPECT_DOUBLE_EQ(net.edges[0].length, 1528.0);
  EXPECT_EQ(net.edges[0].lane_kind, LaneKind::BikeLane);
  EXPECT_TRUE(net.signal_programs.empty());
  EXPECT_DOUBLE_EQ(build_straight_corridor(1023.0, 8.0).edges[0].speed_limit, 8.0);
}

TEST(Corridor, InvalidLength) {
  try {
    build_straight_corridor(0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSpec);
  }
  EXPECT_THROW(build_straight_corridor(-5.0), Error);
}

TEST(FourWay, FourApproachesWithAllMovements) {
  const auto net = build_four_way_intersection();
  for (const std::string x : {"N", "E", "S", "W"}) {
    const auto in = "in_" + x;
    ASSERT_TRUE(net.has_edge(in));
    ASSERT_TRUE(net.has_edge("out_" + x));
    EXPECT_TRUE(net.edge(in).stop_control.has_value());
    for (auto via : {ConnectionVia::Straight, ConnectionVia::Right, ConnectionVia::LeftDirect,
                     ConnectionVia::LeftIndirectLeg1})
      EXPECT_TRUE(net.has_movement(in, via)) << in << " " << to_string(via);
    const auto indirect = net.route(in, ConnectionVia::LeftIndirectLeg1);
    const auto direct = net.route(in, ConnectionVia::LeftDirect);
    EXPECT_EQ(indirect.front(), in);
    EXPECT_EQ(indirect.back(), direct.back());
    EXPECT_GT(route_length(net, indirect), route_length(net, direct));
  }
  EXPECT_EQ(net.signal_programs.size(), 1u);
  EXPECT_EQ(net.signal_programs[0].approaches().size(), 4u);
}

TEST(FourWay, IndirectLegsArePerpendicularAndWaitIsSignalled) {
  const auto net = build_four_way_intersection();
  const auto route = net.route("in_S", ConnectionVia::LeftIndirectLeg1);
  ASSERT_EQ(route.size(), 4u);
  const auto& leg1 = net.edge(route[1]);
  const auto& leg2 = net.edge(route[2]);
  ASSERT_TRUE(leg1.stop_control.has_value());
  EXPECT_EQ(leg1.stop_control->node, "C");
  auto node_pos = [&](const std::string& id) {
    for (const auto& n : net.nodes)
      if (n.id == id) return std::pair{n.x, n.y};
    ADD_FAILURE() << "no node " << id;
    return std::pair{0.0, 0.0};
  };
  const auto [ax, ay] = node_pos(leg1.from);
  const auto [bx, by] = node_pos(leg1.to);
  const auto [cx, cy] = node_pos(leg2.to);
  EXPECT_NEAR((bx - ax) * (cx - bx) + (by - ay) * (cy - by), 0.0, 1e-9);
  EXPECT_EQ(leg1.to, leg2.from);
  // The wait line belongs to the perpendicular axis.
  const auto& prog = net.program("C");
  EXPECT_EQ(signal_state_at(prog, 10.0, "in_S"), SignalState::Green);
  EXPECT_EQ(signal_state_at(prog, 10.0, leg1.stop_control->approach), SignalState::Red);
}

TEST(FourWay, RejectsBadSpecs) {
  FourWaySpec spec;
  spec.arm_length = 0.0;
  EXPECT_THROW(build_four_way_intersection(spec), Error);
  spec = {};
  spec.phases = {{30.0, {"in_N", "in_E"}}, {30.0, {"in_S", "in_W"}}};
  EXPECT_THROW(build_four_way_intersection(spec), Error);
  spec = {};
  spec.phases = {{60.0, {"in_N", "in_S", "in_E", "in_W"}}};
  EXPECT_THROW(build_four_way_intersection(spec), Error);
}

TEST(Signal, FixedTimePhases) {
  const auto p = two_phase();
  EXPECT_DOUBLE_EQ(p.cycle(), 60.0);
  EXPECT_EQ(signal_state_at(p, 10.0, "in_N"), SignalState::Green);
  EXPECT_EQ(signal_state_at(p, 30.0, "in_N"), SignalState::Red);
  EXPECT_EQ(signal_state_at(p, 75.0, "in_N"), signal_state_at(p, 15.0, "in_N"));
  EXPECT_EQ(signal_state_at(p, 75.0, "in_E"), signal_state_at(p, 15.0, "in_E"));
}

TEST(Signal, AmberAtPhaseEnd) {
  const auto p = two_phase(3.0);
  EXPECT_EQ(signal_state_at(p, 26.9, "in_N"), SignalState::Green);
  EXPECT_EQ(signal_state_at(p, 27.0, "in_N"), SignalState::Amber);
  EXPECT_EQ(signal_state_at(p, 29.99, "in_N"), SignalState::Amber);
  EXPECT_EQ(signal_state_at(p, 29.99, "in_E"), SignalState::Red);
  EXPECT_EQ(signal_state_at(p, 30.0, "in_E"), SignalState::Green);
}

TEST(Signal, PerpendicularNeverGreenTogether) {
  const auto net = build_four_way_intersection();
  const auto& p = net.program("C");
  for (double t = 0.0; t < 3 * p.cycle(); t += 0.25) {
    const bool ns = signal_state_at(p, t, "in_N") != SignalState::Red || signal_state_at(p, t, "in_S") != SignalState::Red;
    const bool ew = signal_state_at(p, t, "in_E") != SignalState::Red || signal_state_at(p, t, "in_W") != SignalState::Red;
    EXPECT_FALSE(ns && ew) << "t=" << t;
    // Exactly one phase is active.
    EXPECT_TRUE(ns || ew) << "t=" << t;
  }
}

TEST(Signal, Errors) {
  const auto p = two_phase();
  try {
    signal_state_at(p, 5.0, "in_X");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownApproach);
  }
  EXPECT_THROW(signal_state_at(p, -1.0, "in_N"), Error);
  auto bad = two_phase(40.0);
  EXPECT_THROW(bad.validate(), Error);
  bad = two_phase();
  bad.phases[0].duration = 0.0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(NetworkValidation, ReferencesChecked) {
  Network net = build_straight_corridor(100.0);
  net.connections.push_back({"corridor_missing", net.edges[0].id, ConnectionVia::Straight, {net.edges[0].id}, {}});
  EXPECT_THROW(net.finalize(), Error);

  Network dup = build_straight_corridor(100.0);
  dup.edges.push_back(dup.edges[0]);
  EXPECT_THROW(dup.finalize(), Error);

  Network zero = build_straight_corridor(100.0);
  zero.edges[0].length = 0.0;
  EXPECT_THROW(zero.finalize(), Error);
}

TEST(NetworkEnums, StringRoundTrip) {
  for (auto v : {ConnectionVia::Straight, ConnectionVia::LeftDirect, ConnectionVia::LeftIndirectLeg1,
                 ConnectionVia::LeftIndirectLeg2, ConnectionVia::Right})
    EXPECT_EQ(connection_via_from_string(to_string(v)), v);
  for (auto k : {LaneKind::Road, LaneKind::BikeLane}) EXPECT_EQ(lane_kind_from_string(to_string(k)), k);
  EXPECT_THROW(connection_via_from_string("u_turn"), Error);
}
