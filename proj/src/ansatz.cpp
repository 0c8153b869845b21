#include "plateau/ansatz.hpp"

namespace plateau {

std::string to_string(Entanglement entanglement) {
  return entanglement == Entanglement::Ring ? "ring" : "none";
}

Entanglement parse_entanglement(const std::string& text) {
  if (text == "ring" || text == "entangled") return Entanglement::Ring;
  if (text == "none" || text == "unentangled") return Entanglement::None;
  throw Error(ErrorKind::Config, "unknown entanglement '" + text + "' (expected ring or none)");
}

}  // namespace plateau
