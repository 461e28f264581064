from .records import (LabeledRecord, DatasetHeader, write_dataset, read_dataset, dataset_hash, stack, FORMAT_VERSION,
                      CANONICALIZATION)
from .sampler import weighted_vertex_mixture, sample_behavior, record_seed
from .generation import (SamplerConfig, GenerationSummary, label_behavior, generate_record, generate_dataset,
                         split_dataset, FAILURE_RATE_LIMIT)

__all__ = ['LabeledRecord', 'DatasetHeader', 'write_dataset', 'read_dataset', 'dataset_hash', 'stack',
           'FORMAT_VERSION', 'CANONICALIZATION', 'weighted_vertex_mixture', 'sample_behavior', 'record_seed',
           'SamplerConfig', 'GenerationSummary', 'label_behavior', 'generate_record', 'generate_dataset',
           'split_dataset', 'FAILURE_RATE_LIMIT']
