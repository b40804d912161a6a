int main() {
    int total, k;
    float value, acc;
    scanf("%d", &total);
    acc = 0.0;
    k = 0;
    while (k < total) {
        scanf("%f", &value);
        acc += value;
        k++;
    }
    printf("%.2f", acc / total);
    return 0;
}
