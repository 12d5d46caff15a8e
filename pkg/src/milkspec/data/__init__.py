from milkspec.data.chemistry import (
    ChemistryPanel,
    FATTY_ACID_VOCABULARY,
    GROUP_NAMES,
    parse_chemistry_table,
    read_chemistry_csv,
)
from milkspec.data.dataset import (
    Dataset,
    GroupSummary,
    build_dataset,
    discretize_target,
    group_summary,
)
from milkspec.data.envi import (
    EnviHeader,
    HyperCube,
    Roi,
    RoiSpectrum,
    WavelengthGrid,
    extract_center_roi,
    extract_roi_block,
    parse_envi_header,
    read_cube,
    read_cube_file,
    roi_mean_spectrum,
    write_cube,
    write_cube_files,
)

__all__ = [
    "ChemistryPanel",
    "Dataset",
    "EnviHeader",
    "FATTY_ACID_VOCABULARY",
    "GROUP_NAMES",
    "GroupSummary",
    "HyperCube",
    "Roi",
    "RoiSpectrum",
    "WavelengthGrid",
    "build_dataset",
    "discretize_target",
    "extract_center_roi",
    "extract_roi_block",
    "group_summary",
    "parse_chemistry_table",
    "parse_envi_header",
    "read_chemistry_csv",
    "read_cube",
    "read_cube_file",
    "roi_mean_spectrum",
    "write_cube",
    "write_cube_files",
]
