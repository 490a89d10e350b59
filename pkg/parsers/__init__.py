# Parsers package
from .system import parse_system, system_from_dict, system_to_dict, emit_system
from .partial_function import parse_partial_function, partial_function_from_dict, partial_function_to_dict
