#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "noether/pipeline.hpp"

namespace noether {

inline constexpr int kCertificateSchemaVersion = 1;

/// JSON document for a certificate.  input is the group spec text; when empty it is
/// synthesized from the family parameters.  Keys are sorted, so dumps are deterministic.
nlohmann::json certificate_to_json(const Certificate& c, const std::string& input = {});
std::string certificate_dump(const Certificate& c, const std::string& input = {});

/// Rebuilds a certificate (group from the echoed input).  Throws ArgumentError on a malformed document.
Certificate certificate_from_json(const nlohmann::json& j);

struct RecheckReport {
  bool ok = false;
  int steps_checked = 0;
  std::vector<std::string> failures;
};

/// Re-verifies every step from the document alone: substitutions are re-applied to the previous
/// action and compared with the recorded result, cyclic linearizations are regenerated and PIT-checked.
RecheckReport recheck_certificate(const nlohmann::json& j);

}  // namespace noether
