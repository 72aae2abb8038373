from .result_writer import ResultWriter, RunManifest, format_float, jsonable
