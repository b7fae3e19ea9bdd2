from .report import emit, format_rows, save_report, print_report_summary, FORMATS
