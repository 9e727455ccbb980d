// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Fixed-precision rendering of floats for reports: 12 significant digits.

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to 12 significant digits. Serializing the result with serde_json
/// prints at most that many digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Plain decimal text with 12 significant digits and no trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        return "0".to_string();
    }
    if !r.is_finite() {
        return r.to_string();
    }
    // Display for f64 prints the shortest round-tripping decimal, which for a
    // value already rounded to 12 digits never exceeds 12 digits
    let magnitude = r.abs();
    if !(1e-6..1e15).contains(&magnitude) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-1234.5), "-1234.5");
        assert_eq!(fmt_sig(6.0 / 7.0), "0.857142857143");
        assert_eq!(fmt_sig(1.0 / 9.0 * 1e-15), "1.11111111111e-16");
        assert_eq!(fmt_sig(2e20), "2e20");
        assert_eq!(round_sig(2.0 / 3.0), 0.666666666667);
    }
}
