use std::fs;
use std::path::Path;

use super::ascii::{parse_ascii_grid, parse_ascii_header};
use super::{CellIndex, GeoError, GridGeometry, Raster};
use crate::firesim::FuelCatalog;

/// The eight landscape layers, in file order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layer {
    Elevation,
    Slope,
    Aspect,
    FuelModel,
    CanopyCover,
    StandHeight,
    CanopyBaseHeight,
    CanopyBulkDensity,
}

impl Layer {
    pub const ALL: [Layer; 8] = [
        Layer::Elevation,
        Layer::Slope,
        Layer::Aspect,
        Layer::FuelModel,
        Layer::CanopyCover,
        Layer::StandHeight,
        Layer::CanopyBaseHeight,
        Layer::CanopyBulkDensity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Layer::Elevation => "elevation",
            Layer::Slope => "slope",
            Layer::Aspect => "aspect",
            Layer::FuelModel => "fuel_model",
            Layer::CanopyCover => "canopy_cover",
            Layer::StandHeight => "stand_height",
            Layer::CanopyBaseHeight => "canopy_base_height",
            Layer::CanopyBulkDensity => "canopy_bulk_density",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.asc", self.name())
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Co-registered terrain, fuel and canopy rasters.
///
/// Canopy layers are carried and validated for shape only; the spread kernel
/// has no crown-fire component.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeStack {
    layers: [Raster; 8],
}

impl LandscapeStack {
    /// Validates shared geometry, slope/aspect ranges and fuel codes.
    pub fn new(layers: [Raster; 8], catalog: &FuelCatalog) -> Result<Self, GeoError> {
        let reference = *layers[0].geometry();
        for (layer, raster) in Layer::ALL.iter().zip(&layers).skip(1) {
            if *raster.geometry() != reference {
                return Err(GeoError::HeaderMismatch { layer: layer.name() });
            }
        }
        let stack = Self { layers };
        stack.check_ranges(catalog)?;
        Ok(stack)
    }

    /// A flat stack with one fuel code everywhere and zeroed canopy.
    pub fn uniform(geometry: GridGeometry, fuel_code: i32, catalog: &FuelCatalog) -> Result<Self, GeoError> {
        let nodata = -9999.0;
        let layers = Layer::ALL.map(|layer| match layer {
            Layer::FuelModel => Raster::filled(geometry, fuel_code as f64, nodata),
            Layer::Aspect => Raster::filled(geometry, nodata, nodata),
            _ => Raster::filled(geometry, 0.0, nodata),
        });
        Self::new(layers, catalog)
    }

    fn check_ranges(&self, catalog: &FuelCatalog) -> Result<(), GeoError> {
        let geom = self.geometry();
        let check = |layer: Layer, ok: &dyn Fn(f64) -> bool| -> Result<(), GeoError> {
            let r = self.layer(layer);
            for (i, &v) in r.values().iter().enumerate() {
                if !r.is_nodata(v) && !ok(v) {
                    return Err(GeoError::InvalidValue {
                        layer: layer.name(),
                        cell: geom.cell_at(i),
                        value: v,
                    });
                }
            }
            Ok(())
        };
        check(Layer::Slope, &|v| (0.0..90.0).contains(&v))?;
        check(Layer::Aspect, &|v| (0.0..360.0).contains(&v))?;
        check(Layer::FuelModel, &|v| v.fract() == 0.0 && v.abs() < i32::MAX as f64)?;

        let fuel = self.fuel_model();
        for (i, &v) in fuel.values().iter().enumerate() {
            if fuel.is_nodata(v) {
                continue;
            }
            if !catalog.contains(v as i32) {
                return Err(GeoError::UnknownFuel {
                    code: v as i32,
                    cell: geom.cell_at(i),
                });
            }
        }
        Ok(())
    }

    pub fn geometry(&self) -> &GridGeometry {
        self.layers[0].geometry()
    }

    pub fn layer(&self, layer: Layer) -> &Raster {
        &self.layers[layer.index()]
    }

    pub fn elevation(&self) -> &Raster {
        self.layer(Layer::Elevation)
    }

    pub fn slope(&self) -> &Raster {
        self.layer(Layer::Slope)
    }

    pub fn aspect(&self) -> &Raster {
        self.layer(Layer::Aspect)
    }

    pub fn fuel_model(&self) -> &Raster {
        self.layer(Layer::FuelModel)
    }

    /// Fuel code at `cell`, `None` where the fuel layer is nodata.
    pub fn fuel_code(&self, cell: CellIndex) -> Option<i32> {
        self.fuel_model().value(cell).map(|v| v as i32)
    }

    /// Replaces one layer, re-running validation.
    pub fn with_layer(mut self, layer: Layer, raster: Raster, catalog: &FuelCatalog) -> Result<Self, GeoError> {
        self.layers[layer.index()] = raster;
        Self::new(self.layers, catalog)
    }

    pub fn into_layers(self) -> [Raster; 8] {
        self.layers
    }
}

/// Loads `<dir>/<layer>.asc` for all eight layers.
pub fn load_landscape(dir: &Path, catalog: &FuelCatalog) -> Result<LandscapeStack, GeoError> {
    let mut texts = Vec::with_capacity(8);
    for layer in Layer::ALL {
        let path = dir.join(layer.file_name());
        let text = fs::read_to_string(&path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => GeoError::MissingLayer(path.display().to_string()),
            _ => GeoError::Io(format!("{}: {e}", path.display())),
        })?;
        texts.push(text);
    }

    let in_layer = |layer: Layer| move |e: GeoError| GeoError::InLayer {
        layer: layer.name(),
        source: Box::new(e),
    };

    // compare headers before paying for the bodies
    let mut reference: Option<GridGeometry> = None;
    for (layer, text) in Layer::ALL.iter().zip(&texts) {
        let header = parse_ascii_header(text).map_err(in_layer(*layer))?;
        match reference {
            None => reference = Some(header.geometry),
            Some(g) if g != header.geometry => {
                return Err(GeoError::HeaderMismatch { layer: layer.name() })
            }
            Some(_) => {}
        }
    }

    let mut rasters = Vec::with_capacity(8);
    for (layer, text) in Layer::ALL.iter().zip(&texts) {
        rasters.push(parse_ascii_grid(text).map_err(in_layer(*layer))?);
    }
    let layers: [Raster; 8] = rasters.try_into().expect("eight layers");
    LandscapeStack::new(layers, catalog)
}
