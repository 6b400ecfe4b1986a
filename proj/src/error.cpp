#include "sirsql/error.hpp"

namespace sirsql {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnterminatedStatement: return "UnterminatedStatement";
    case Errc::DuplicateAttribute: return "DuplicateAttribute";
    case Errc::UnrenderableNode: return "UnrenderableNode";
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::CircularReference: return "CircularReferenceError";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::UnknownRelation: return "UnknownRelation";
    case Errc::UnknownColumn: return "UnknownColumn";
    case Errc::AmbiguousColumn: return "AmbiguousColumn";
    case Errc::CorruptCatalog: return "CorruptCatalog";
    case Errc::MissingRecursiveJoin: return "MissingRecursiveJoin";
    case Errc::IeCycle: return "IeCycle";
    case Errc::UnknownExcludedColumn: return "UnknownExcludedColumn";
    case Errc::NameCollision: return "NameCollision";
    case Errc::RecursiveJoinAttributeDrop: return "RecursiveJoinAttributeDrop";
    case Errc::UnknownIE: return "UnknownIE";
    case Errc::DependentsExist: return "DependentsExist";
    case Errc::IndexOnInheritedAttribute: return "IndexOnInheritedAttribute";
    case Errc::NotRewritable: return "NotRewritable";
    case Errc::CapabilityMissing: return "CapabilityMissing";
    case Errc::Unsupported: return "Unsupported";
    case Errc::KernelError: return "KernelError";
    case Errc::NestedTransaction: return "NestedTransaction";
    case Errc::UnknownObject: return "UnknownObject";
    case Errc::RejectedWrite: return "RejectedWrite";
    case Errc::IaNotComputable: return "IaNotComputable";
    case Errc::NotApplicable: return "NotApplicable";
    case Errc::NoProgress: return "NoProgress";
    case Errc::SchemaMismatch: return "SchemaMismatch";
  }
  return "Error";
}

std::string SyntaxError::format(const std::string& message, int line, int column,
                                const std::vector<std::string>& expected) {
  std::string out = std::to_string(line) + ":" + std::to_string(column) + ": " + message;
  if (!expected.empty()) {
    out += ", expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) out += i + 1 == expected.size() ? " or " : ", ";
      out += expected[i];
    }
  }
  return out;
}

}  // namespace sirsql
