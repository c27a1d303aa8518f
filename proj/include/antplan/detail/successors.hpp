#pragma once

// Successor generation shared by applicable_actions() and the planner.

namespace antplan {

template <typename Fn>
void for_each_successor(const WorldState& state, Fn&& fn) {
  const World& w = state.world();
  const auto& objs = state.objects();
  const int n_containers = static_cast<int>(w.containers().size());
  const int n_objects = static_cast<int>(objs.size());
  const Cell robot = state.robot_cell();
  const auto cap = w.capacity_limit();
  const ActionCosts& costs = w.costs();

  int held = -1;
  std::vector<int> counts(n_containers, 0);
  for (int o = 0; o < n_objects; ++o) {
    if (objs[o].location == kHeld) held = o;
    else ++counts[objs[o].location];
  }
  auto container_id = [&](int slot) { return w.containers()[slot]; };
  auto object_id = [&](int slot) { return w.objects()[slot]; };

  // clear(c)
  const int disposal = w.disposal_slot();
  if (disposal >= 0) {
    for (int c = 0; c < n_containers; ++c) {
      if (c == disposal || counts[c] == 0 || !w.within_reach(robot, c)) continue;
      if (cap && counts[disposal] + counts[c] > *cap) continue;
      WorldState next = state;
      for (int o = 0; o < n_objects; ++o)
        if (objs[o].location == c) next.mutable_object(o).location = static_cast<std::uint8_t>(disposal);
      fn(GroundedAction{ActionName::Clear, {container_id(c), {}}, costs.clear}, std::move(next));
    }
  }

  if (held >= 0) {
    const ObjectState& h = objs[held];
    // fill(o, src) / make-coffee(o, src)
    if (w.fillable(held) && h.dirty == 0 && h.liquid < 0) {
      auto emit_fill = [&](ActionName name, const std::vector<int>& sources, int liquid, Cost cost) {
        if (liquid < 0) return;
        for (int s : sources) {
          if (!w.within_reach(robot, s)) continue;
          WorldState next = state;
          next.mutable_object(held).liquid = static_cast<std::int8_t>(liquid);
          fn(GroundedAction{name, {object_id(held), container_id(s)}, cost}, std::move(next));
        }
      };
      emit_fill(ActionName::Fill, w.water_sources(), w.water_slot(), costs.fill);
      emit_fill(ActionName::MakeCoffee, w.coffee_sources(), w.coffee_slot(), costs.make_coffee);
    }
  }

  // move(c)
  for (int c = 0; c < n_containers; ++c) {
    const Cell target = w.container_cell(c);
    if (target == robot) continue;
    const Cost cost = w.move_cost(robot, c);
    if (cost.is_infinite()) continue;
    WorldState next = state;
    next.set_robot_cell(target);
    fn(GroundedAction{ActionName::Move, {container_id(c), {}}, cost}, std::move(next));
  }

  if (held < 0) {
    // pick(o, c)
    for (int o = 0; o < n_objects; ++o) {
      const int c = objs[o].location;
      if (!w.within_reach(robot, c)) continue;
      WorldState next = state;
      next.mutable_object(o).location = kHeld;
      fn(GroundedAction{ActionName::Pick, {object_id(o), container_id(c)}, costs.pick}, std::move(next));
    }
  } else {
    // place(o, c)
    for (int c = 0; c < n_containers; ++c) {
      if (!w.within_reach(robot, c)) continue;
      if (cap && counts[c] >= *cap) continue;
      WorldState next = state;
      next.mutable_object(held).location = static_cast<std::uint8_t>(c);
      fn(GroundedAction{ActionName::Place, {object_id(held), container_id(c)}, costs.place},
         std::move(next));
    }
    // wash(o, sink)
    const ObjectState& h = objs[held];
    if (w.washable(held) && (h.dirty != 0 || h.liquid >= 0)) {
      for (int s : w.sinks()) {
        if (!w.within_reach(robot, s)) continue;
        WorldState next = state;
        next.mutable_object(held).dirty = 0;
        next.mutable_object(held).liquid = -1;
        fn(GroundedAction{ActionName::Wash, {object_id(held), container_id(s)}, costs.wash},
           std::move(next));
      }
    }
  }
}

}  // namespace antplan
