from .services import (
    get_logger,
    get_handle_error,
    get_result_writer,
    get_decouple_service,
    get_code_service,
    get_capacity_service,
    get_typicality_service,
    get_service,
)
