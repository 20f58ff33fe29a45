#include "fogsim/types.hpp"

namespace fogsim {

const char* role_name(Role r) {
  switch (r) {
    case Role::Robot:
      return "robot";
    case Role::Frs:
      return "frs";
    case Role::SubFrs:
      return "sub_frs";
    case Role::CloudRegion:
      return "cloud_region";
  }
  return "unknown";
}

}  // namespace fogsim
