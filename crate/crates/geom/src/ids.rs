//! Index newtypes for surfaces, cells, universes, and materials.

use std::fmt;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident, $tag:expr) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn idx(self) -> usize {
                self.0 as usize
            }

            #[inline]
            pub fn from_idx(i: usize) -> Self {
                $name(i as u32)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($tag, "{}"), self.0)
            }
        }
    };
}

id_type!(
    /// Surface index local to one universe.
    SurfaceId,
    "s"
);
id_type!(
    /// Cell index local to one universe.
    CellId,
    "c"
);
id_type!(
    /// Universe index within a geometry model.
    UniverseId,
    "u"
);
id_type!(
    /// Material index within a material set.
    MaterialId,
    "m"
);
