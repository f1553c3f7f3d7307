"""Versioned JSON and CSV file formats."""

from .formats import (
    CheckReportFile,
    OperatorFile,
    QuorumFile,
    read_check_report,
    read_operator,
    read_probabilities,
    read_quorum,
    read_quorum_file,
    read_state,
    read_trajectory,
    write_check_report,
    write_json,
    write_operator,
    write_probabilities,
    write_quorum,
    write_state,
    write_trajectory,
)
