#include "csrpe/types.hpp"

namespace csrpe {

std::string to_bit_string(const LabelVector& y) {
  std::string s(static_cast<std::size_t>(y.size()), '0');
  for (Index k = 0; k < y.size(); ++k) {
    if (y[k]) s[static_cast<std::size_t>(k)] = '1';
  }
  return s;
}

LabelVector from_bit_string(const std::string& s) {
  LabelVector y(static_cast<Index>(s.size()));
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] != '0' && s[k] != '1') {
      throw Error("invalid bit string '" + s + "'");
    }
    y[static_cast<Index>(k)] = s[k] == '1' ? 1 : 0;
  }
  return y;
}

LabelVector make_label(std::initializer_list<int> bits) {
  LabelVector y(static_cast<Index>(bits.size()));
  Index k = 0;
  for (int b : bits) y[k++] = b ? 1 : 0;
  return y;
}

}  // namespace csrpe
