#pragma once

#include <string>

#include "cox.hpp"
#include "data.hpp"

namespace rmdur {

// fitted pair of hazard models plus the dataset facts prediction needs
struct model_artifact {
  std::string protected_column;
  restriction_window window{};
  bool has_window = false;
  std::vector<std::string> x_names;
  std::vector<std::string> z_names;
  cox_fit promo;
  cox_fit retire;
  std::string data_digest;  // digest of the csv the fit consumed, for provenance
};

model_artifact fit_model(const dataset& ds);

std::string model_to_json(const model_artifact& m);
model_artifact model_from_json(const std::string& text);

// recompute per-subject score residuals for a loaded artifact; the stored
// baseline must agree with the event times rebuilt from ds or the artifact
// does not belong to this dataset
void attach_residuals(model_artifact& m, const dataset& ds);

// coefficient table: process,term,coef,hr,se,z,p
std::string coef_table_csv(const model_artifact& m);
std::string coef_table_json(const model_artifact& m);

}  // namespace rmdur
