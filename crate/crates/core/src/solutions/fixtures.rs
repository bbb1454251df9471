use super::{ClosureReport, FamilyConfig, FamilyDescriptor, FamilyKind, Variant};
use crate::error::Result;

/// Bundled JSON configuration for each family.
pub fn fixture_json(kind: FamilyKind) -> &'static str {
    match kind {
        FamilyKind::Canonical2 => include_str!("../../fixtures/canonical2.json"),
        FamilyKind::WdvvT => include_str!("../../fixtures/wdvv-t.json"),
        FamilyKind::WdvvS => include_str!("../../fixtures/wdvv-s.json"),
        FamilyKind::HardRod1 => include_str!("../../fixtures/hardrod1.json"),
        FamilyKind::HardRod2 => include_str!("../../fixtures/hardrod2.json"),
    }
}

/// The bundled configuration built with the requested formula variant.
pub fn fixture(kind: FamilyKind, variant: Variant) -> Result<(FamilyConfig, Option<ClosureReport>)> {
    let mut d = FamilyDescriptor::from_json(fixture_json(kind))?;
    d.variant = variant;
    d.build()
}
