#include "qttconv/lowrank.hpp"

#include <cmath>
#include <sstream>

namespace qttconv {

std::string describe(const TruncationPolicy& policy) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Tolerance>)
          os << "tolerance(" << p.value << ")";
        else if constexpr (std::is_same_v<P, MaxRank>)
          os << "maxrank(" << p.rank << ")";
        else if constexpr (std::is_same_v<P, DropOff>)
          os << "dropoff(" << p.ratio << ")";
        else
          os << "randomized(" << p.rank << ",p=" << p.oversampling << ",seed=" << p.seed << ")";
      },
      policy);
  return os.str();
}

TruncationPolicy parse_policy(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto bad = [&] { return std::invalid_argument("cannot parse truncation policy '" + text + "'"); };
  if (parts.size() < 2) throw bad();

  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != s.size()) throw bad();
    return v;
  };
  auto integer = [&](const std::string& s) {
    const double v = number(s);
    if (v != std::floor(v) || v < 0) throw bad();
    return static_cast<Index>(v);
  };

  TruncationPolicy p;
  const std::string& kind = parts[0];
  if ((kind == "tolerance" || kind == "tol") && parts.size() == 2)
    p = Tolerance{number(parts[1])};
  else if (kind == "maxrank" && parts.size() == 2)
    p = MaxRank{integer(parts[1])};
  else if (kind == "dropoff" && parts.size() == 2)
    p = DropOff{number(parts[1])};
  else if (kind == "randomized" && parts.size() <= 4)
    p = Randomized{integer(parts[1]), parts.size() > 2 ? integer(parts[2]) : 5,
                   parts.size() > 3 ? std::uint64_t(integer(parts[3])) : 0};
  else
    throw bad();
  validate(p);
  return p;
}

}  // namespace qttconv
