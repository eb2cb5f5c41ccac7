// Flies past a single cylinder with the default parameters and prints the
// trajectory summary.

#include "tentanav/tentanav.hpp"

#include <iostream>
#include <memory>

using namespace tentanav;

int main()
{
  Config config;
  validate(config);
  auto bank = std::make_shared<const TentacleBank>(TentacleBank::build(config.offline));

  sim::WorldMap map;
  map.id = "single_cylinder";
  map.bounds = {{-2, -5, 0}, {20, 5, 10}};
  map.ground = true;
  map.obstacles.push_back(sim::Cylinder{6.0, 0.3, 0.5, 6.0});
  map.start = {0, 0, 1.5};
  map.goals = {{15, 0, 1.5}};

  Navigator nav(config, bank);
  sim::SimWorld world(map, sim::SensorModel::from(config), config.robot);
  RobotState start;
  start.position = map.start;

  const NavResult res = run(nav, world, start, map.goals, 60.0);
  std::cout << io::to_json(res).dump(2) << '\n';
  for (std::size_t i = 0; i < res.cycles.size(); i += 10) {
    const auto& c = res.cycles[i];
    std::cout << c.t << "  (" << c.position.transpose() << ")  yaw " << c.yaw << '\n';
  }
  return res.success ? 0 : 1;
}
