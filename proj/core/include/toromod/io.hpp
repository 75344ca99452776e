#pragma once

#include <iosfwd>
#include <string>

#include "toromod/complex.hpp"

namespace toromod {

/// Serialize a complex to the documented JSON schema: arrays `vertices`
/// (id, mu), `edges` (id, u, v, ell, mu, w), `faces` (oriented edge-id
/// cycles), scalar `q` and a `meta` block. All reals decimal; NaN/Inf are
/// rejected.
void save_complex(const ToroidalComplex& c, std::ostream& sink);
void save_complex(const ToroidalComplex& c, const std::string& path);

/// Parse, rebuild derived state and validate; throws ParseError on malformed
/// input and ValidationError when the loaded complex breaks an invariant.
ToroidalComplex load_complex(std::istream& source);
ToroidalComplex load_complex(const std::string& path);

/// Parse without validating; for inspection tools that report violations
/// instead of rejecting the document.
ToroidalComplex load_complex_unchecked(std::istream& source);
ToroidalComplex load_complex_unchecked(const std::string& path);

}  // namespace toromod
