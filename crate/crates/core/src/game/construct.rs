//! Building a second environment that switches the phase portrait of a mixture.
//!
//! Given `A1` and a switch point `p*`, [`switching_partner`] returns `A2` such that
//! `A(p) = p A1 + (1 - p) A2` keeps the portrait of `A1` for `p* < p < 1` and takes
//! the target portrait for `0 < p < p*`. Each payoff gap (`a - c` and `d - b`) is
//! handled independently: when the target needs the sign `A1` already has, the
//! entries are copied; otherwise the gap of `A2` is set to `-(p*/(1-p*))` times the
//! gap of `A1`, so the mixed gap is `gap1 * (p - p*) / (1 - p*)` and vanishes at `p*`.

use crate::error::{Error, Result};
use crate::game::two_by_two::{classify_2x2, Game2x2, PortraitClass, PortraitTag, DEFAULT_TOL};

/// Required signs of `(a - c, d - b)` for each non-degenerate class.
fn required_signs(tag: PortraitTag) -> Option<(f64, f64)> {
    match tag {
        PortraitTag::P1 => Some((-1.0, 1.0)),
        PortraitTag::P2 => Some((1.0, -1.0)),
        PortraitTag::HD => Some((-1.0, -1.0)),
        PortraitTag::Co => Some((1.0, 1.0)),
        PortraitTag::Degenerate => None,
    }
}

/// `free_param` is the arbitrary anchor entry (`a2`, and `b2` when the second gap
/// flips); it defaults to zero.
pub fn switching_partner(
    first: &Game2x2,
    target: PortraitTag,
    p_star: f64,
    free_param: Option<f64>,
) -> Result<Game2x2> {
    first.validate()?;
    if !(p_star > 0.0 && p_star < 1.0) {
        return Err(Error::Domain(format!("switch point {p_star} must lie in (0, 1)")));
    }
    let (want_first, want_second) =
        required_signs(target).ok_or(Error::UnsupportedTarget(target))?;
    match classify_2x2(first, DEFAULT_TOL) {
        PortraitClass::Degenerate => {
            return Err(Error::Domain("first game is degenerate".into()));
        }
        PortraitClass::P1 { weak: true } | PortraitClass::P2 { weak: true } => {
            return Err(Error::Domain(
                "first game has a vanishing payoff gap; both gaps must be strictly signed".into(),
            ));
        }
        _ => {}
    }

    let anchor = free_param.unwrap_or(0.0);
    if !anchor.is_finite() {
        return Err(Error::NonFinite);
    }
    let ratio = p_star / (1.0 - p_star);
    let gap_first = first.first_column_gap();
    let gap_second = first.second_column_gap();

    let mut partner = *first;
    if gap_first.signum() != want_first {
        partner.a = anchor;
        partner.c = anchor + ratio * gap_first;
    }
    if gap_second.signum() != want_second {
        partner.b = anchor;
        partner.d = anchor - ratio * gap_second;
    }
    partner.validate()?;
    Ok(partner)
}
