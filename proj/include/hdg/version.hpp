#ifndef HDG_VERSION_HPP
#define HDG_VERSION_HPP

namespace hdg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hdg

#endif  // HDG_VERSION_HPP
