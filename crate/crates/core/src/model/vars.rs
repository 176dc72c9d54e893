//! Dense variable catalog: a bijection between flat column indices and
//! `(family, subscripts)` pairs.
//!
//! Families are laid out in a fixed order as contiguous blocks; inside a
//! block subscripts enumerate in row-major order. Integrality marks sit
//! exactly on the unit-count, truck-count and direction/rounding families.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::scenario::{EnergySource, Scenario};

/// Variable family. Subscript order is the one listed on each variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VarFamily {
    /// Production rate, kg/day: (p, j, i, g, t, m).
    Pr,
    /// Storage level held, kg: (i, g, t, m).
    St,
    /// Station throughput, kg/day: (fs, j, i, g, t, m).
    Fr,
    /// Transported quantity, kg/day: (i, l, g, g', t, m).
    Q,
    /// Transport units in service (integer): (i, l, g, g', t, m).
    Ntugrid,
    /// Trip rounding binary: (i, l, g, g', t).
    Epsilon,
    /// Flow direction binary: (i, l, g, g', t).
    Xe,
    /// Production units installed (integer): (p, j, i, g, t).
    Np,
    /// New production units (integer): (p, j, i, g, t).
    Ip,
    /// Storage units (integer): (i, j, g, t).
    Ns,
    /// New storage units (integer): (i, j, g, t).
    NsNew,
    /// Station units (integer): (i, j, g, t).
    Nfs,
    /// New station units (integer): (i, j, g, t).
    NfsNew,
    /// Installed power, kW: (g, m, e).
    Esp,
    /// Energy consumption, kWh/day: (g, t, m).
    Esu,
    /// Retrofit truck hydrogen use, kg/day: (i, g, t, m).
    Dretrofit,
    /// Water consumed, m3/day: (g, t, m).
    Watercons,
    /// Vulnerability-indexed withdrawal, m3 x index per month: (g, t, m).
    Wcv,
    /// Average daily water cost, EUR/day: (t).
    Watercost,
    /// Truck fleet per arc and period (continuous aux >= monthly truck
    /// counts, carries the transport capex): (i, l, g, g', t).
    TruckFleet,
    /// Fleet increment between periods (continuous aux): (i, l, g, g', t).
    TruckNew,
    /// Conversion units serving exports (continuous aux): (i, g, t).
    ConvUnits,
    /// Conversion unit increment (continuous aux): (i, g, t).
    ConvNew,
}

impl VarFamily {
    pub const ALL: [VarFamily; 23] = [
        VarFamily::Pr,
        VarFamily::St,
        VarFamily::Fr,
        VarFamily::Q,
        VarFamily::Ntugrid,
        VarFamily::Epsilon,
        VarFamily::Xe,
        VarFamily::Np,
        VarFamily::Ip,
        VarFamily::Ns,
        VarFamily::NsNew,
        VarFamily::Nfs,
        VarFamily::NfsNew,
        VarFamily::Esp,
        VarFamily::Esu,
        VarFamily::Dretrofit,
        VarFamily::Watercons,
        VarFamily::Wcv,
        VarFamily::Watercost,
        VarFamily::TruckFleet,
        VarFamily::TruckNew,
        VarFamily::ConvUnits,
        VarFamily::ConvNew,
    ];

    pub fn label(self) -> &'static str {
        match self {
            VarFamily::Pr => "PR",
            VarFamily::St => "ST",
            VarFamily::Fr => "FR",
            VarFamily::Q => "Q",
            VarFamily::Ntugrid => "NTUGRID",
            VarFamily::Epsilon => "EPSILON",
            VarFamily::Xe => "XE",
            VarFamily::Np => "NP",
            VarFamily::Ip => "IP",
            VarFamily::Ns => "NS",
            VarFamily::NsNew => "NSNEW",
            VarFamily::Nfs => "NFS",
            VarFamily::NfsNew => "NFSNEW",
            VarFamily::Esp => "ESP",
            VarFamily::Esu => "ESU",
            VarFamily::Dretrofit => "DRETROFIT",
            VarFamily::Watercons => "WATERCONS",
            VarFamily::Wcv => "WCV",
            VarFamily::Watercost => "WATERCOST",
            VarFamily::TruckFleet => "TRF",
            VarFamily::TruckNew => "TRN",
            VarFamily::ConvUnits => "CU",
            VarFamily::ConvNew => "CUN",
        }
    }

    /// True for the families carrying integrality marks.
    pub fn is_integer(self) -> bool {
        matches!(
            self,
            VarFamily::Ntugrid
                | VarFamily::Epsilon
                | VarFamily::Xe
                | VarFamily::Np
                | VarFamily::Ip
                | VarFamily::Ns
                | VarFamily::NsNew
                | VarFamily::Nfs
                | VarFamily::NfsNew
        )
    }
}

/// Dense index over every family for one scenario's set sizes.
#[derive(Debug, Clone)]
pub struct VariableIndex {
    dims: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    total: usize,
}

impl VariableIndex {
    pub fn new(s: &Scenario) -> Self {
        let (ng, nt, nm) = (s.sets.n_grids(), s.sets.n_periods(), s.sets.n_months());
        let (np, nj, ni, nl) = (s.sets.n_tech(), s.sets.n_sizes(), s.sets.n_forms(), s.sets.n_modes());
        let ne = EnergySource::ALL.len();
        let dims: Vec<Vec<usize>> = VarFamily::ALL
            .iter()
            .map(|f| match f {
                VarFamily::Pr => alloc::vec![np, nj, ni, ng, nt, nm],
                VarFamily::St => alloc::vec![ni, ng, nt, nm],
                VarFamily::Fr => alloc::vec![ni, nj, ni, ng, nt, nm],
                VarFamily::Q | VarFamily::Ntugrid => alloc::vec![ni, nl, ng, ng, nt, nm],
                VarFamily::Epsilon | VarFamily::Xe | VarFamily::TruckFleet | VarFamily::TruckNew => {
                    alloc::vec![ni, nl, ng, ng, nt]
                }
                VarFamily::Np | VarFamily::Ip => alloc::vec![np, nj, ni, ng, nt],
                VarFamily::Ns | VarFamily::NsNew | VarFamily::Nfs | VarFamily::NfsNew => {
                    alloc::vec![ni, nj, ng, nt]
                }
                VarFamily::Esp => alloc::vec![ng, nm, ne],
                VarFamily::Esu | VarFamily::Watercons | VarFamily::Wcv => alloc::vec![ng, nt, nm],
                VarFamily::Dretrofit => alloc::vec![ni, ng, nt, nm],
                VarFamily::Watercost => alloc::vec![nt],
                VarFamily::ConvUnits | VarFamily::ConvNew => alloc::vec![ni, ng, nt],
            })
            .collect();
        let mut offsets = Vec::with_capacity(dims.len());
        let mut total = 0;
        for d in &dims {
            offsets.push(total);
            total += d.iter().product::<usize>();
        }
        VariableIndex { dims, offsets, total }
    }

    pub fn n_vars(&self) -> usize {
        self.total
    }

    fn family_slot(family: VarFamily) -> usize {
        VarFamily::ALL.iter().position(|&f| f == family).unwrap()
    }

    /// Flat column index of `(family, subscripts)`.
    pub fn index(&self, family: VarFamily, subs: &[usize]) -> usize {
        let slot = Self::family_slot(family);
        let dims = &self.dims[slot];
        debug_assert_eq!(subs.len(), dims.len(), "{} subscript arity", family.label());
        let mut idx = 0;
        for (k, &s) in subs.iter().enumerate() {
            debug_assert!(s < dims[k], "{} subscript {k} out of range", family.label());
            idx = idx * dims[k] + s;
        }
        self.offsets[slot] + idx
    }

    /// Inverse of [`index`]: the family and subscripts of a flat index.
    ///
    /// [`index`]: VariableIndex::index
    pub fn decode(&self, mut flat: usize) -> (VarFamily, Vec<usize>) {
        debug_assert!(flat < self.total);
        let slot = match self.offsets.binary_search(&flat) {
            Ok(s) => {
                // offsets of empty blocks coincide; take the last block that
                // actually starts here and is nonempty
                let mut s = s;
                while s + 1 < self.offsets.len() && self.offsets[s + 1] == flat {
                    s += 1;
                }
                s
            }
            Err(s) => s - 1,
        };
        flat -= self.offsets[slot];
        let dims = &self.dims[slot];
        let mut subs = alloc::vec![0usize; dims.len()];
        for k in (0..dims.len()).rev() {
            subs[k] = flat % dims[k];
            flat /= dims[k];
        }
        (VarFamily::ALL[slot], subs)
    }

    /// Human-readable name of a flat index, with set labels substituted.
    pub fn name(&self, s: &Scenario, flat: usize) -> String {
        let (family, subs) = self.decode(flat);
        let slot = Self::family_slot(family);
        let mut parts: Vec<String> = Vec::with_capacity(subs.len());
        // subscript roles follow the family dims construction above
        let roles: &[&str] = match family {
            VarFamily::Pr => &["p", "j", "i", "g", "t", "m"],
            VarFamily::St => &["i", "g", "t", "m"],
            VarFamily::Fr => &["i", "j", "i", "g", "t", "m"],
            VarFamily::Q | VarFamily::Ntugrid => &["i", "l", "g", "g", "t", "m"],
            VarFamily::Epsilon | VarFamily::Xe | VarFamily::TruckFleet | VarFamily::TruckNew => {
                &["i", "l", "g", "g", "t"]
            }
            VarFamily::Np | VarFamily::Ip => &["p", "j", "i", "g", "t"],
            VarFamily::Ns | VarFamily::NsNew | VarFamily::Nfs | VarFamily::NfsNew => &["i", "j", "g", "t"],
            VarFamily::Esp => &["g", "m", "e"],
            VarFamily::Esu | VarFamily::Watercons | VarFamily::Wcv => &["g", "t", "m"],
            VarFamily::Dretrofit => &["i", "g", "t", "m"],
            VarFamily::Watercost => &["t"],
            VarFamily::ConvUnits | VarFamily::ConvNew => &["i", "g", "t"],
        };
        debug_assert_eq!(roles.len(), self.dims[slot].len());
        for (k, &sub) in subs.iter().enumerate() {
            parts.push(match roles[k] {
                "p" => s.sets.technologies[sub].label().into(),
                "j" => s.sets.sizes[sub].label().into(),
                "i" => s.sets.forms[sub].label().into(),
                "l" => s.sets.modes[sub].label().into(),
                "g" => s.sets.grids[sub].clone(),
                "t" => format!("{}", s.sets.period_years[sub]),
                "m" => format!("m{}", s.sets.months[sub]),
                "e" => EnergySource::ALL[sub].label().into(),
                _ => unreachable!(),
            });
        }
        format!("{}[{}]", family.label(), parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_decode_round_trip_is_bijective() {
        let s = crate::synth::desk_reference();
        let vars = VariableIndex::new(&s);
        for flat in 0..vars.n_vars() {
            let (family, subs) = vars.decode(flat);
            assert_eq!(vars.index(family, &subs), flat, "{} {:?}", family.label(), subs);
        }
    }

    #[test]
    fn integrality_marks_sit_on_the_declared_families() {
        let s = crate::synth::desk_reference();
        let vars = VariableIndex::new(&s);
        for flat in 0..vars.n_vars() {
            let (family, _) = vars.decode(flat);
            let expect = matches!(
                family.label(),
                "NTUGRID" | "EPSILON" | "XE" | "NP" | "IP" | "NS" | "NSNEW" | "NFS" | "NFSNEW"
            );
            assert_eq!(family.is_integer(), expect);
        }
    }

    #[test]
    fn names_use_set_labels() {
        let s = crate::synth::desk_reference();
        let vars = VariableIndex::new(&s);
        let j = vars.index(VarFamily::Pr, &[0, 0, 0, 1, 0, 1]);
        assert_eq!(vars.name(&s, j), "PR[AE,mini,gas,south,2025,m8]");
        let j = vars.index(VarFamily::Watercost, &[1]);
        assert_eq!(vars.name(&s, j), "WATERCOST[2026]");
    }
}
