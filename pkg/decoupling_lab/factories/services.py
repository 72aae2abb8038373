import logging

from decoupling_lab.results.result_writer import ResultWriter
from decoupling_lab.services.capacity_service import CapacityService
from decoupling_lab.services.code_service import CodeService
from decoupling_lab.services.decouple_service import DecoupleService
from decoupling_lab.services.typicality_service import TypicalityService
from decoupling_lab.utils.error_handler import handle_error


def get_logger():
    return logging.getLogger('decoupling_lab')


def get_handle_error():
    return handle_error


def get_result_writer(out_dir):
    return ResultWriter(out_dir, get_logger())


def get_decouple_service():
    return DecoupleService(get_logger())


def get_code_service():
    return CodeService(get_logger())


def get_capacity_service():
    return CapacityService(get_logger())


def get_typicality_service():
    return TypicalityService(get_logger())


SERVICE_FACTORIES = {
    'decouple': get_decouple_service,
    'code': get_code_service,
    'capacity': get_capacity_service,
    'typicality': get_typicality_service,
}


def get_service(command):
    return SERVICE_FACTORIES[command]()
