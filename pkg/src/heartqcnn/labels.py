"""Class labels shared by the signal, training, and CLI layers."""

S3 = "S3"
MURMUR = "MURMUR"

LABELS = (S3, MURMUR)

#: regression target used by the trainer readout
LABEL_VALUES = {S3: 1.0, MURMUR: -1.0}
